#include "imitate/engine/kinematic_engine.hpp"

#include "imitate/kinematics/motion.hpp"
#include "imitate/util/error.hpp"

namespace imitate::engine {

KinematicEngine::KinematicEngine(std::shared_ptr<const kin::CharacterModel> character, EngineConfig config,
                                 int num_envs, std::uint64_t seed)
    : Engine(std::move(character), std::move(config), num_envs) {
  for (int i = 0; i < num_envs; ++i) noise_.emplace_back(derive_seed(seed, static_cast<std::uint64_t>(i)));
}

nlohmann::json KinematicEngine::backend_state() const {
  nlohmann::json rngs = nlohmann::json::array();
  for (const auto& r : noise_) rngs.push_back(r.serialize());
  return {{"noise_rngs", rngs}};
}

void KinematicEngine::set_backend_state(const nlohmann::json& j) {
  const auto& rngs = j.at("noise_rngs");
  if (!rngs.is_array() || rngs.size() != noise_.size()) throw FormatError("kinematic engine state: rng count mismatch");
  for (std::size_t i = 0; i < noise_.size(); ++i) noise_[i].deserialize(rngs[i].get<std::string>());
}

void KinematicEngine::advance(int env, SimState& s, const Eigen::VectorXd& command) {
  const auto& ch = *character_;
  const auto& layout = ch.layout();
  const double dt = config_.control_dt();
  switch (config_.control_mode) {
    case ControlMode::none:
    case ControlMode::torque:
      return;
    case ControlMode::pos:
    case ControlMode::pd_1d: {
      kin::Pose next = s.pose;
      next.dofs = command;
      if (config_.action_noise > 0.0) {
        for (Eigen::Index k = 0; k < next.dofs.size(); ++k) next.dofs[k] += config_.action_noise * noise_[env].normal();
      }
      const kin::PoseVelocity v = kin::pose_difference_velocity(layout, s.pose, next, dt);
      s.pose = std::move(next);
      s.vel.root_lin_vel.setZero();
      s.vel.root_ang_vel.setZero();
      s.vel.dof_vel = v.dof_vel;
      return;
    }
    case ControlMode::vel: {
      for (int j = 1; j < ch.num_joints(); ++j) {
        const int off = layout.offsets[j];
        if (layout.kinds[j] == kin::JointKind::revolute) {
          s.pose.dofs[off] += command[off] * dt;
        } else if (layout.kinds[j] == kin::JointKind::spherical) {
          const kin::Quat q = kin::exp_map_to_quat(s.pose.dofs.segment<3>(off));
          const kin::Quat step = kin::exp_map_to_quat(command.segment<3>(off) * dt);
          s.pose.dofs.segment<3>(off) = kin::quat_to_exp_map(q * step);
        }
      }
      s.vel.root_lin_vel.setZero();
      s.vel.root_ang_vel.setZero();
      s.vel.dof_vel = command;
      return;
    }
  }
}

}  // namespace imitate::engine

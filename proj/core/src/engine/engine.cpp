#include "imitate/engine/engine.hpp"

#include <algorithm>
#include <cmath>

#include "imitate/engine/kinematic_engine.hpp"
#include "imitate/engine/planar_engine.hpp"
#include "imitate/kinematics/forward_kinematics.hpp"
#include "imitate/util/error.hpp"

namespace imitate::engine {

const char* to_string(ControlMode m) {
  switch (m) {
    case ControlMode::none:
      return "none";
    case ControlMode::pos:
      return "pos";
    case ControlMode::vel:
      return "vel";
    case ControlMode::torque:
      return "torque";
    case ControlMode::pd_1d:
      return "pd_1d";
  }
  return "?";
}

const char* to_string(Backend b) { return b == Backend::kinematic ? "kinematic" : "planar_dynamics"; }

ControlMode control_mode_from_string(const std::string& s) {
  if (s == "none") return ControlMode::none;
  if (s == "pos") return ControlMode::pos;
  if (s == "vel") return ControlMode::vel;
  if (s == "torque") return ControlMode::torque;
  if (s == "pd_1d") return ControlMode::pd_1d;
  throw ConfigError("unknown control_mode '" + s + "' (none|pos|vel|torque|pd_1d)");
}

Backend backend_from_string(const std::string& s) {
  if (s == "kinematic") return Backend::kinematic;
  if (s == "planar_dynamics") return Backend::planar_dynamics;
  throw ConfigError("unknown engine backend '" + s + "' (kinematic|planar_dynamics)");
}

int EngineConfig::substeps() const { return static_cast<int>(std::lround(sim_freq / control_freq)); }

Vec3 EngineConfig::gravity_for(const kin::CharacterModel& ch) const {
  return gravity ? *gravity : Vec3(-9.81 * ch.up());
}

void EngineConfig::validate(const kin::CharacterModel& ch) const {
  if (!(control_freq > 0.0) || !(sim_freq > 0.0)) throw ConfigError("control_freq and sim_freq must be positive");
  const double ratio = sim_freq / control_freq;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0) {
    throw ConfigError("sim_freq must be a positive integer multiple of control_freq");
  }
  if (control_mode == ControlMode::pd_1d && ch.has_spherical()) {
    throw ConfigError("control_mode pd_1d requires a character made only of revolute joints");
  }
  if (backend == Backend::kinematic && control_mode == ControlMode::torque) {
    throw ConfigError("the kinematic backend has no dynamics and cannot apply torque commands");
  }
  if (action_noise < 0.0) throw ConfigError("action_noise must be non-negative");
}

EngineConfig EngineConfig::from_json(const nlohmann::json& j) {
  EngineConfig c;
  try {
    if (j.contains("backend")) c.backend = backend_from_string(j.at("backend").get<std::string>());
    if (j.contains("control_mode")) c.control_mode = control_mode_from_string(j.at("control_mode").get<std::string>());
    c.control_freq = j.value("control_freq", c.control_freq);
    c.sim_freq = j.value("sim_freq", c.sim_freq);
    if (j.contains("gravity")) {
      const auto& g = j.at("gravity");
      if (!g.is_array() || g.size() != 3) throw ConfigError("engine.gravity must be a 3-array");
      c.gravity = Vec3(g[0].get<double>(), g[1].get<double>(), g[2].get<double>());
    }
    c.ground_height = j.value("ground_height", c.ground_height);
    c.action_noise = j.value("action_noise", c.action_noise);
    if (j.contains("contact")) {
      const auto& cj = j.at("contact");
      c.contact.normal_stiffness = cj.value("normal_stiffness", c.contact.normal_stiffness);
      c.contact.normal_damping = cj.value("normal_damping", c.contact.normal_damping);
      c.contact.tangent_damping = cj.value("tangent_damping", c.contact.tangent_damping);
      c.contact.friction = cj.value("friction", c.contact.friction);
      c.contact.tolerance = cj.value("tolerance", c.contact.tolerance);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("engine config: ") + e.what());
  }
  return c;
}

nlohmann::json EngineConfig::to_json() const {
  nlohmann::json j{{"backend", to_string(backend)},
                   {"control_mode", to_string(control_mode)},
                   {"control_freq", control_freq},
                   {"sim_freq", sim_freq},
                   {"ground_height", ground_height},
                   {"action_noise", action_noise},
                   {"contact",
                    {{"normal_stiffness", contact.normal_stiffness},
                     {"normal_damping", contact.normal_damping},
                     {"tangent_damping", contact.tangent_damping},
                     {"friction", contact.friction},
                     {"tolerance", contact.tolerance}}}};
  if (gravity) j["gravity"] = {gravity->x(), gravity->y(), gravity->z()};
  return j;
}

namespace {

nlohmann::json vec_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec3 vec3_from_json(const nlohmann::json& j) {
  const Eigen::VectorXd v = vec_from_json(j);
  if (v.size() != 3) throw FormatError("expected a 3-vector");
  return v;
}

}  // namespace

nlohmann::json state_to_json(const SimState& s) {
  const auto& q = s.pose.root_rot;
  return {{"root_pos", vec_to_json(s.pose.root_pos)},
          {"root_rot", {q.w(), q.x(), q.y(), q.z()}},
          {"dofs", vec_to_json(s.pose.dofs)},
          {"root_lin_vel", vec_to_json(s.vel.root_lin_vel)},
          {"root_ang_vel", vec_to_json(s.vel.root_ang_vel)},
          {"dof_vel", vec_to_json(s.vel.dof_vel)},
          {"contacts", std::vector<int>(s.contacts.begin(), s.contacts.end())},
          {"failed", s.failed}};
}

SimState state_from_json(const nlohmann::json& j) {
  SimState s;
  try {
    s.pose.root_pos = vec3_from_json(j.at("root_pos"));
    const auto q = j.at("root_rot").get<std::vector<double>>();
    if (q.size() != 4) throw FormatError("root_rot must have 4 components");
    s.pose.root_rot = kin::Quat::from_stored(q[0], q[1], q[2], q[3]);
    s.pose.dofs = vec_from_json(j.at("dofs"));
    s.vel.root_lin_vel = vec3_from_json(j.at("root_lin_vel"));
    s.vel.root_ang_vel = vec3_from_json(j.at("root_ang_vel"));
    s.vel.dof_vel = vec_from_json(j.at("dof_vel"));
    const auto c = j.at("contacts").get<std::vector<int>>();
    s.contacts.assign(c.begin(), c.end());
    s.failed = j.at("failed").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("simulation state: ") + e.what());
  }
  return s;
}

double pd_torque(double q, double qdot, double target, const kin::PdGains& gains, double limit) {
  const double tau = gains.kp * (target - q) - gains.kd * qdot;
  return std::clamp(tau, -limit, limit);
}

Vec3 pd_torque(const kin::Quat& q, const Vec3& omega, const kin::Quat& target, const kin::PdGains& gains,
               double limit) {
  const Vec3 err = kin::quat_to_exp_map(q.conjugate() * target);
  Vec3 tau = gains.kp * err - gains.kd * omega;
  for (int k = 0; k < 3; ++k) tau[k] = std::clamp(tau[k], -limit, limit);
  return tau;
}

Engine::Engine(std::shared_ptr<const kin::CharacterModel> character, EngineConfig config, int num_envs)
    : character_(std::move(character)), config_(std::move(config)) {
  if (num_envs < 1) throw InvalidArgument("engine needs at least one env");
  config_.validate(*character_);
  const SimState init = make_state(kin::default_pose(*character_), kin::zero_velocity(*character_));
  states_.assign(num_envs, init);
}

const SimState& Engine::get_state(int i) const {
  if (i < 0 || i >= num_envs()) throw InvalidArgument("env index " + std::to_string(i) + " out of range");
  return states_[i];
}

void Engine::set_state(int i, const SimState& s) {
  if (i < 0 || i >= num_envs()) throw InvalidArgument("env index " + std::to_string(i) + " out of range");
  kin::check_pose(*character_, s.pose);
  if (s.vel.dof_vel.size() != character_->dof_count()) throw InvalidArgument("velocity DoF count mismatch");
  states_[i] = s;
}

void Engine::update_contacts(SimState& s) const {
  const auto frames = kin::forward_kinematics(*character_, s.pose);
  s.contacts.assign(character_->num_joints(), 0);
  const double threshold = config_.ground_height + config_.contact.tolerance;
  for (int j = 0; j < character_->num_joints(); ++j) {
    s.contacts[j] = kin::body_lowest_point(*character_, frames, j) <= threshold ? 1 : 0;
  }
}

SimState Engine::make_state(const kin::Pose& pose, const kin::PoseVelocity& vel) const {
  SimState s{pose, vel, {}, false};
  update_contacts(s);
  return s;
}

void Engine::step(const Eigen::Ref<const Eigen::MatrixXd>& commands) {
  if (commands.rows() != character_->dof_count() || commands.cols() != num_envs()) {
    throw InvalidArgument("command batch must be " + std::to_string(character_->dof_count()) + " x " +
                          std::to_string(num_envs()));
  }
  for (int i = 0; i < num_envs(); ++i) step_env(i, commands.col(i));
}

void Engine::step_env(int i, const Eigen::Ref<const Eigen::VectorXd>& command) {
  if (i < 0 || i >= num_envs()) throw InvalidArgument("env index " + std::to_string(i) + " out of range");
  if (command.size() != character_->dof_count()) {
    throw InvalidArgument("command length " + std::to_string(command.size()) + " != dof count " +
                          std::to_string(character_->dof_count()));
  }
  SimState& s = states_[i];
  if (!command.allFinite()) {
    s.failed = true;
    return;
  }
  advance(i, s, command);
  if (!s.pose.root_pos.allFinite() || !s.pose.dofs.allFinite() || !s.vel.dof_vel.allFinite() ||
      !std::isfinite(s.pose.root_rot.norm())) {
    s.failed = true;
    return;
  }
  update_contacts(s);
}

std::unique_ptr<Engine> make_engine(std::shared_ptr<const kin::CharacterModel> character, const EngineConfig& config,
                                    int num_envs, std::uint64_t seed) {
  switch (config.backend) {
    case Backend::kinematic:
      return std::make_unique<KinematicEngine>(std::move(character), config, num_envs, seed);
    case Backend::planar_dynamics:
      return std::make_unique<PlanarEngine>(std::move(character), config, num_envs);
  }
  throw ConfigError("unknown backend");
}

}  // namespace imitate::engine

#include "imitate/envs/features.hpp"

#include <cmath>
#include <numbers>

#include "imitate/kinematics/forward_kinematics.hpp"
#include "imitate/kinematics/motion.hpp"

namespace imitate::envs {
namespace {

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

void add_pose_features(const kin::CharacterModel& ch, const kin::Pose& pose, FeatureWriter& w) {
  const Quat inv_heading = inverse_heading(ch, pose.root_rot);
  w.add(pose.root_pos.dot(ch.up()));
  w.add(kin::tan_norm(inv_heading * pose.root_rot));
  add_joint_features(ch, pose, w);
  const auto frames = kin::forward_kinematics(ch, pose);
  for (int e : ch.end_effectors()) w.add(inv_heading.rotate(frames[e].pos - pose.root_pos));
}

int pose_feature_dim(const kin::CharacterModel& ch) {
  return 1 + 6 + joint_feature_dim(ch) + 3 * static_cast<int>(ch.end_effectors().size());
}

}  // namespace

Quat inverse_heading(const kin::CharacterModel& ch, const Quat& root_rot) {
  if (ch.up_axis() != kin::UpAxis::z) return Quat::identity();
  return kin::heading_rotation(root_rot, ch.up()).conjugate();
}

int joint_feature_dim(const kin::CharacterModel& ch) {
  int n = 0;
  for (int j = 1; j < ch.num_joints(); ++j) {
    const auto kind = ch.joint(j).kind;
    if (kind == kin::JointKind::revolute) n += 2;
    if (kind == kin::JointKind::spherical) n += 6;
  }
  return n;
}

void add_joint_features(const kin::CharacterModel& ch, const kin::Pose& pose, FeatureWriter& w) {
  for (int j = 1; j < ch.num_joints(); ++j) {
    const auto kind = ch.joint(j).kind;
    const int off = ch.dof_offset(j);
    if (kind == kin::JointKind::revolute) {
      w.add(std::sin(pose.dofs[off]));
      w.add(std::cos(pose.dofs[off]));
    } else if (kind == kin::JointKind::spherical) {
      w.add(kin::tan_norm(kin::exp_map_to_quat(pose.dofs.segment<3>(off))));
    }
  }
}

int character_obs_dim(const kin::CharacterModel& ch) { return pose_feature_dim(ch) + 6 + ch.dof_count(); }

void add_character_obs(const kin::CharacterModel& ch, const kin::Pose& pose, const kin::PoseVelocity& vel,
                       FeatureWriter& w) {
  const Quat inv_heading = inverse_heading(ch, pose.root_rot);
  add_pose_features(ch, pose, w);
  w.add(inv_heading.rotate(vel.root_lin_vel));
  w.add(inv_heading.rotate(vel.root_ang_vel));
  w.add(vel.dof_vel);
}

double tracking_reward(const kin::CharacterModel& ch, const kin::Pose& sim, const kin::PoseVelocity& sim_vel,
                       const kin::Pose& ref, const kin::PoseVelocity& ref_vel, const TrackingWeights& wt) {
  double pose_err = kin::rotation_distance(sim.root_rot, ref.root_rot);
  pose_err *= pose_err;
  for (int j = 1; j < ch.num_joints(); ++j) {
    if (ch.dof_dim(j) == 0) continue;
    const double d = kin::rotation_distance(kin::joint_rotation(ch, sim, j), kin::joint_rotation(ch, ref, j));
    pose_err += d * d;
  }
  const double vel_err = (ref_vel.dof_vel - sim_vel.dof_vel).squaredNorm();

  const auto xs = kin::forward_kinematics(ch, sim);
  const auto xr = kin::forward_kinematics(ch, ref);
  double ee_err = 0.0;
  for (int e : ch.end_effectors()) {
    ee_err += ((xr[e].pos - ref.root_pos) - (xs[e].pos - sim.root_pos)).squaredNorm();
  }
  const double root_err = (ref.root_pos - sim.root_pos).squaredNorm();

  const double total = wt.w_pose + wt.w_vel + wt.w_ee + wt.w_root;
  return (wt.w_pose * std::exp(-wt.a_pose * pose_err) + wt.w_vel * std::exp(-wt.a_vel * vel_err) +
          wt.w_ee * std::exp(-wt.a_ee * ee_err) + wt.w_root * std::exp(-wt.a_root * root_err)) /
         total;
}

int amp_feature_dim(const kin::CharacterModel& ch) { return 2 * pose_feature_dim(ch) + 6 + ch.dof_count(); }

Eigen::VectorXd amp_observation_pair(const kin::CharacterModel& ch, const kin::Pose& prev, const kin::Pose& cur,
                                     double dt) {
  std::vector<double> out;
  out.reserve(amp_feature_dim(ch));
  FeatureWriter w(out);
  add_pose_features(ch, prev, w);
  add_pose_features(ch, cur, w);
  const kin::PoseVelocity v = kin::pose_difference_velocity(ch.layout(), prev, cur, dt);
  const Quat inv_heading = inverse_heading(ch, cur.root_rot);
  w.add(inv_heading.rotate(v.root_lin_vel));
  w.add(inv_heading.rotate(v.root_ang_vel));
  w.add(v.dof_vel);
  return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

int add_delta_dim(const kin::CharacterModel& ch) { return 6 + 2 * ch.dof_count(); }

Eigen::VectorXd add_difference_obs(const kin::CharacterModel& ch, const kin::Pose& sim, const kin::PoseVelocity& sim_vel,
                                   const kin::Pose& ref, const kin::PoseVelocity& ref_vel) {
  const int nd = ch.dof_count();
  Eigen::VectorXd d(add_delta_dim(ch));
  d.head<3>() = ref.root_pos - sim.root_pos;
  d.segment<3>(3) = kin::quat_to_exp_map(sim.root_rot.conjugate() * ref.root_rot);
  for (int j = 1; j < ch.num_joints(); ++j) {
    const int off = ch.dof_offset(j);
    switch (ch.joint(j).kind) {
      case kin::JointKind::revolute:
        d[6 + off] = wrap_angle(ref.dofs[off] - sim.dofs[off]);
        break;
      case kin::JointKind::spherical: {
        const Quat qs = kin::exp_map_to_quat(sim.dofs.segment<3>(off));
        const Quat qr = kin::exp_map_to_quat(ref.dofs.segment<3>(off));
        d.segment<3>(6 + off) = kin::quat_to_exp_map(qs.conjugate() * qr);
        break;
      }
      default:
        break;
    }
  }
  d.tail(nd) = ref_vel.dof_vel - sim_vel.dof_vel;
  return d;
}

Eigen::Vector2d horizontal(const kin::CharacterModel& ch, const Vec3& v) {
  if (ch.up_axis() == kin::UpAxis::z) return {v.x(), v.y()};
  return {v.x(), v.z()};
}

TargetLocationResult target_location_task(const kin::CharacterModel& ch, const kin::Pose& pose, const Vec3& goal) {
  TargetLocationResult r;
  const Vec3 rel = goal - pose.root_pos;
  r.local_goal = horizontal(ch, inverse_heading(ch, pose.root_rot).rotate(rel));
  r.distance = horizontal(ch, rel).norm();
  r.reward = std::exp(-0.5 * r.distance * r.distance);
  return r;
}

}  // namespace imitate::envs

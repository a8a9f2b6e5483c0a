#pragma once

#include <vector>

#include <Eigen/Core>

#include "imitate/kinematics/character.hpp"

namespace imitate::kin {

/// Root transform plus joint DoFs in frame layout
/// (exp map for spherical joints, angle for revolute joints).
struct Pose {
  Vec3 root_pos = Vec3::Zero();
  Quat root_rot;
  Eigen::VectorXd dofs;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Root velocities are world-frame; dof_vel shares the DoF layout
/// (local angular velocity for spherical joints, joint rate for revolute joints).
struct PoseVelocity {
  Vec3 root_lin_vel = Vec3::Zero();
  Vec3 root_ang_vel = Vec3::Zero();
  Eigen::VectorXd dof_vel;

  friend bool operator==(const PoseVelocity&, const PoseVelocity&) = default;
};

Pose zero_pose(const CharacterModel& ch);
Pose default_pose(const CharacterModel& ch);
PoseVelocity zero_velocity(const CharacterModel& ch);

/// Frame row [root pos (3), root exp map (3), joint DoFs] to Pose.
Pose pose_from_frame(const FrameLayout& layout, const Eigen::Ref<const Eigen::VectorXd>& frame);
Eigen::VectorXd frame_from_pose(const Pose& pose);

/// Local rotation of joint j (identity for fixed joints and the root).
Quat joint_rotation(const FrameLayout& layout, const std::vector<JointSpec>& joints, const Pose& pose, int j);
Quat joint_rotation(const CharacterModel& ch, const Pose& pose, int j);

/// Throws InvalidArgument when the DoF vector size does not match the character.
void check_pose(const CharacterModel& ch, const Pose& pose);

}  // namespace imitate::kin

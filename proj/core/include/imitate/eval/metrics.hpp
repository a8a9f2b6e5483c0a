#pragma once

#include <vector>

#include <Eigen/Core>

#include "imitate/kinematics/pose.hpp"

namespace imitate::eval {

using kin::Vec3;

/// Position tracking error in metres.
///
/// (1/(N+1)) * ( sum_j |(xr_j - xr_root) - (x_j - x_root)| + |xr_root - x_root| )
/// over the N non-root joints.
double e_pos(const std::vector<Vec3>& sim_joints, const Vec3& sim_root, const std::vector<Vec3>& ref_joints,
             const Vec3& ref_root);

/// DoF velocity error: (1/(N+1)) * sum_j |qdot_ref_j - qdot_j| over the N non-root
/// joints, with the same N+1 normalizer as e_pos.
double e_vel(const kin::FrameLayout& layout, const Eigen::VectorXd& sim_dof_vel, const Eigen::VectorXd& ref_dof_vel);

/// e_pos with joint positions from forward kinematics of both poses.
double e_pos(const kin::CharacterModel& ch, const kin::Pose& sim, const kin::Pose& ref);

}  // namespace imitate::eval

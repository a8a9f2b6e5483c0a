#pragma once

#include <vector>

#include <Eigen/Core>

#include "imitate/engine/engine.hpp"
#include "imitate/kinematics/pose.hpp"

namespace imitate::envs {

using kin::Quat;
using kin::Vec3;

/// Appends values to a flat feature vector.
class FeatureWriter {
 public:
  explicit FeatureWriter(std::vector<double>& out) : out_(out) {}
  void add(double v) { out_.push_back(v); }
  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out_.push_back(v.derived()(i));
  }

 private:
  std::vector<double>& out_;
};

/// Inverse heading rotation for z-up characters; identity for y-up (planar) ones,
/// whose root turns about the horizontal z axis.
Quat inverse_heading(const kin::CharacterModel& ch, const Quat& root_rot);

/// (sin, cos) per revolute joint, 6D tangent-normal per spherical joint.
int joint_feature_dim(const kin::CharacterModel& ch);
void add_joint_features(const kin::CharacterModel& ch, const kin::Pose& pose, FeatureWriter& w);

/// Proprioceptive observation of one character state:
/// root height, root rotation and velocities in the heading frame, joint features,
/// DoF velocities, end-effector positions relative to the root in the heading frame.
int character_obs_dim(const kin::CharacterModel& ch);
void add_character_obs(const kin::CharacterModel& ch, const kin::Pose& pose, const kin::PoseVelocity& vel,
                       FeatureWriter& w);

struct TrackingWeights {
  double w_pose = 0.65, w_vel = 0.10, w_ee = 0.15, w_root = 0.10;
  double a_pose = 2.0, a_vel = 0.1, a_ee = 40.0, a_root = 10.0;
};

/// Sum of four exponentiated tracking terms, weights normalized to sum 1:
/// joint and root rotation geodesic distances, DoF velocities, end-effector
/// positions relative to the root, and world root position.
double tracking_reward(const kin::CharacterModel& ch, const kin::Pose& sim, const kin::PoseVelocity& sim_vel,
                       const kin::Pose& ref, const kin::PoseVelocity& ref_vel, const TrackingWeights& weights);

/// Discriminator features of the transition (prev, cur) over dt seconds:
/// per-state pose features for both states, then finite-difference root and
/// joint velocities expressed in the heading frame of `cur`.
int amp_feature_dim(const kin::CharacterModel& ch);
Eigen::VectorXd amp_observation_pair(const kin::CharacterModel& ch, const kin::Pose& prev, const kin::Pose& cur,
                                     double dt);

/// Reference-minus-simulation differences: root position (3), root rotation
/// log(q_sim^-1 q_ref) (3), per-joint rotation errors (exp map for spherical,
/// wrapped angle for revolute), DoF velocity errors.
int add_delta_dim(const kin::CharacterModel& ch);
Eigen::VectorXd add_difference_obs(const kin::CharacterModel& ch, const kin::Pose& sim, const kin::PoseVelocity& sim_vel,
                                   const kin::Pose& ref, const kin::PoseVelocity& ref_vel);

/// Two horizontal coordinates of a vector (x, y for z-up; x, z for y-up).
Eigen::Vector2d horizontal(const kin::CharacterModel& ch, const Vec3& v);

struct TargetLocationResult {
  Eigen::Vector2d local_goal;  // goal relative to the root in the heading frame
  double reward = 0.0;         // exp(-0.5 |root - goal|^2), horizontal distance
  double distance = 0.0;
};
TargetLocationResult target_location_task(const kin::CharacterModel& ch, const kin::Pose& pose, const Vec3& goal);

}  // namespace imitate::envs

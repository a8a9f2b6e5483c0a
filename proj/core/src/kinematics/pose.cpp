#include "imitate/kinematics/pose.hpp"

#include <string>

#include "imitate/util/error.hpp"

namespace imitate::kin {

Pose zero_pose(const CharacterModel& ch) {
  Pose p;
  p.dofs = Eigen::VectorXd::Zero(ch.dof_count());
  return p;
}

Pose default_pose(const CharacterModel& ch) {
  Pose p = zero_pose(ch);
  p.root_pos = ch.default_root_pos();
  p.root_rot = ch.default_root_rot();
  return p;
}

PoseVelocity zero_velocity(const CharacterModel& ch) {
  PoseVelocity v;
  v.dof_vel = Eigen::VectorXd::Zero(ch.dof_count());
  return v;
}

Pose pose_from_frame(const FrameLayout& layout, const Eigen::Ref<const Eigen::VectorXd>& frame) {
  if (frame.size() != layout.frame_width()) {
    throw InvalidArgument("frame width " + std::to_string(frame.size()) + " does not match layout width " +
                          std::to_string(layout.frame_width()));
  }
  Pose p;
  p.root_pos = frame.head<3>();
  p.root_rot = exp_map_to_quat(frame.segment<3>(3));
  p.dofs = frame.tail(layout.dof_count);
  return p;
}

Eigen::VectorXd frame_from_pose(const Pose& pose) {
  Eigen::VectorXd f(6 + pose.dofs.size());
  f.head<3>() = pose.root_pos;
  f.segment<3>(3) = quat_to_exp_map(pose.root_rot);
  f.tail(pose.dofs.size()) = pose.dofs;
  return f;
}

Quat joint_rotation(const FrameLayout& layout, const std::vector<JointSpec>& joints, const Pose& pose, int j) {
  const int off = layout.offsets[j];
  switch (layout.kinds[j]) {
    case JointKind::spherical:
      return exp_map_to_quat(pose.dofs.segment<3>(off));
    case JointKind::revolute:
      return Quat::from_axis_angle(joints[j].axis, pose.dofs[off]);
    default:
      return Quat::identity();
  }
}

Quat joint_rotation(const CharacterModel& ch, const Pose& pose, int j) {
  return joint_rotation(ch.layout(), ch.joints(), pose, j);
}

void check_pose(const CharacterModel& ch, const Pose& pose) {
  if (pose.dofs.size() != ch.dof_count()) {
    throw InvalidArgument("pose has " + std::to_string(pose.dofs.size()) + " DoFs, character '" + ch.name() +
                          "' has " + std::to_string(ch.dof_count()));
  }
}

}  // namespace imitate::kin

#include "imitate/eval/metrics.hpp"

#include "imitate/kinematics/forward_kinematics.hpp"
#include "imitate/util/error.hpp"

namespace imitate::eval {

double e_pos(const std::vector<Vec3>& sim_joints, const Vec3& sim_root, const std::vector<Vec3>& ref_joints,
             const Vec3& ref_root) {
  if (sim_joints.size() != ref_joints.size()) throw InvalidArgument("e_pos: joint count mismatch");
  double sum = (ref_root - sim_root).norm();
  for (std::size_t j = 0; j < sim_joints.size(); ++j) {
    sum += ((ref_joints[j] - ref_root) - (sim_joints[j] - sim_root)).norm();
  }
  return sum / static_cast<double>(sim_joints.size() + 1);
}

double e_vel(const kin::FrameLayout& layout, const Eigen::VectorXd& sim_dof_vel, const Eigen::VectorXd& ref_dof_vel) {
  if (sim_dof_vel.size() != layout.dof_count || ref_dof_vel.size() != layout.dof_count) {
    throw InvalidArgument("e_vel: DoF layout mismatch");
  }
  const int n = layout.num_joints() - 1;
  double sum = 0.0;
  for (int j = 1; j < layout.num_joints(); ++j) {
    const int dim = kin::joint_dof_dim(layout.kinds[j]);
    if (dim == 0) continue;
    const int off = layout.offsets[j];
    sum += (ref_dof_vel.segment(off, dim) - sim_dof_vel.segment(off, dim)).norm();
  }
  return sum / static_cast<double>(n + 1);
}

double e_pos(const kin::CharacterModel& ch, const kin::Pose& sim, const kin::Pose& ref) {
  const auto xs = kin::joint_positions(ch, sim);
  const auto xr = kin::joint_positions(ch, ref);
  const std::vector<Vec3> sim_joints(xs.begin() + 1, xs.end());
  const std::vector<Vec3> ref_joints(xr.begin() + 1, xr.end());
  return e_pos(sim_joints, xs.front(), ref_joints, xr.front());
}

}  // namespace imitate::eval

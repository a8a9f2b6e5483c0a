#include "imitate/engine/planar_engine.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "imitate/kinematics/forward_kinematics.hpp"
#include "imitate/util/error.hpp"

namespace imitate::engine {
namespace {

using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

Vec2 rotate2(double angle, const Vec2& v) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

// z x v
Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

double heading_of(const kin::Quat& q) {
  if (std::abs(q.x()) > 1e-6 || std::abs(q.y()) > 1e-6) {
    throw InvalidArgument("planar root rotation must be about the z axis");
  }
  return 2.0 * std::atan2(q.z(), q.w());
}

/// Spatial inertia (omega, v_origin) of a planar body about the world origin.
Mat3 spatial_inertia(double m, double izz, const Vec2& c) {
  Mat3 I;
  I << izz + m * c.squaredNorm(), -m * c.y(), m * c.x(),
       -m * c.y(), m, 0.0,
       m * c.x(), 0.0, m;
  return I;
}

}  // namespace

PlanarEngine::PlanarEngine(std::shared_ptr<const kin::CharacterModel> character, EngineConfig config, int num_envs)
    : Engine(std::move(character), std::move(config), num_envs) {
  const auto& ch = *character_;
  if (ch.up_axis() != kin::UpAxis::y) throw ConfigError("planar_dynamics requires a character with up_axis 'y'");
  num_root_ = ch.root_is_free() ? 3 : 0;
  const int nj = ch.num_joints();
  axis_sign_.assign(nj, 0.0);
  coord_of_joint_.assign(nj, -1);
  ancestors_.resize(nj);
  subtree_.resize(nj);
  for (int j = 1; j < nj; ++j) {
    const auto& js = ch.joint(j);
    if (js.kind == kin::JointKind::spherical) {
      throw ConfigError("planar_dynamics does not support spherical joint '" + js.name + "'");
    }
    if (js.kind == kin::JointKind::revolute) {
      if (std::abs(std::abs(js.axis.z()) - 1.0) > 1e-9) {
        throw ConfigError("planar_dynamics requires revolute joint '" + js.name + "' to rotate about z");
      }
      axis_sign_[j] = js.axis.z() > 0.0 ? 1.0 : -1.0;
      coord_of_joint_[j] = num_root_ + ch.dof_offset(j);
    }
  }
  for (int j = 0; j < nj; ++j) {
    for (int k = j; k >= 0; k = ch.joint(k).parent) ancestors_[j].insert(ancestors_[j].begin(), k);
    for (int k : ancestors_[j]) subtree_[k].push_back(j);
  }
  for (const auto& b : ch.bodies()) {
    std::vector<std::pair<Vec2, double>> pts;
    for (const auto& cp : kin::contact_points(b)) pts.emplace_back(Vec2(cp.local.x(), cp.local.y()), cp.radius);
    contact_points_.push_back(std::move(pts));
  }
  const Vec3 g = config_.gravity_for(ch);
  gravity_ = Vec2(g.x(), g.y());
}

Eigen::VectorXd PlanarEngine::coords(const SimState& s) const {
  Eigen::VectorXd q(num_coords());
  if (num_root_ == 3) {
    q[0] = s.pose.root_pos.x();
    q[1] = s.pose.root_pos.y();
    q[2] = heading_of(s.pose.root_rot);
  }
  q.tail(character_->dof_count()) = s.pose.dofs;
  return q;
}

Eigen::VectorXd PlanarEngine::coord_velocities(const SimState& s) const {
  Eigen::VectorXd qd(num_coords());
  if (num_root_ == 3) {
    qd[0] = s.vel.root_lin_vel.x();
    qd[1] = s.vel.root_lin_vel.y();
    qd[2] = s.vel.root_ang_vel.z();
  }
  qd.tail(character_->dof_count()) = s.vel.dof_vel;
  return qd;
}

void PlanarEngine::apply_coords(SimState& s, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const {
  if (num_root_ == 3) {
    s.pose.root_pos.x() = q[0];
    s.pose.root_pos.y() = q[1];
    s.pose.root_rot = kin::Quat(std::cos(0.5 * q[2]), 0.0, 0.0, std::sin(0.5 * q[2]));
    s.vel.root_lin_vel = Vec3(qd[0], qd[1], 0.0);
    s.vel.root_ang_vel = Vec3(0.0, 0.0, qd[2]);
  }
  s.pose.dofs = q.tail(character_->dof_count());
  s.vel.dof_vel = qd.tail(character_->dof_count());
}

PlanarEngine::Kinematics2D PlanarEngine::compute_kinematics(const SimState& s, const Eigen::VectorXd& q,
                                                            const Eigen::VectorXd& qd) const {
  const auto& ch = *character_;
  const int nj = ch.num_joints();
  Kinematics2D k;
  k.origin.resize(nj);
  k.angle.resize(nj);
  k.com.resize(nj);
  k.omega.resize(nj);
  k.origin_vel.resize(nj);
  k.com_acc_vp.resize(nj);
  std::vector<Vec2> origin_acc(nj);

  if (num_root_ == 3) {
    k.origin[0] = Vec2(q[0], q[1]);
    k.angle[0] = q[2];
    k.omega[0] = qd[2];
    k.origin_vel[0] = Vec2(qd[0], qd[1]);
  } else {
    k.origin[0] = Vec2(s.pose.root_pos.x(), s.pose.root_pos.y());
    k.angle[0] = heading_of(s.pose.root_rot);
    k.omega[0] = 0.0;
    k.origin_vel[0].setZero();
  }
  origin_acc[0].setZero();

  for (int j = 1; j < nj; ++j) {
    const auto& js = ch.joint(j);
    const int p = js.parent;
    const Vec2 offset(js.local_offset.x(), js.local_offset.y());
    k.origin[j] = k.origin[p] + rotate2(k.angle[p], offset);
    const Vec2 r = k.origin[j] - k.origin[p];
    k.origin_vel[j] = k.origin_vel[p] + k.omega[p] * perp(r);
    origin_acc[j] = origin_acc[p] - k.omega[p] * k.omega[p] * r;
    const int c = coord_of_joint_[j];
    const double qj = c >= 0 ? q[c] : 0.0;
    const double qdj = c >= 0 ? qd[c] : 0.0;
    k.angle[j] = k.angle[p] + axis_sign_[j] * qj;
    k.omega[j] = k.omega[p] + axis_sign_[j] * qdj;
  }
  for (int j = 0; j < nj; ++j) {
    const auto& com = ch.bodies()[j].com;
    k.com[j] = k.origin[j] + rotate2(k.angle[j], Vec2(com.x(), com.y()));
    k.com_acc_vp[j] = origin_acc[j] - k.omega[j] * k.omega[j] * (k.com[j] - k.origin[j]);
  }
  return k;
}

Eigen::MatrixXd PlanarEngine::mass_matrix(const Kinematics2D& k) const {
  const auto& ch = *character_;
  const int nj = ch.num_joints();
  const int n = num_coords();

  // Composite inertias, accumulated leaf-to-root (preorder reversed).
  std::vector<Mat3> composite(nj);
  for (int j = 0; j < nj; ++j) {
    const auto& b = ch.bodies()[j];
    composite[j] = spatial_inertia(b.mass, b.inertia.z(), k.com[j]);
  }
  for (int j = nj - 1; j >= 1; --j) composite[ch.joint(j).parent] += composite[j];

  // Motion subspaces in world coordinates, plus the joint that owns each coordinate.
  std::vector<Eigen::Vector3d> S(n);
  std::vector<int> owner(n, 0);
  if (num_root_ == 3) {
    S[0] = Eigen::Vector3d(0, 1, 0);
    S[1] = Eigen::Vector3d(0, 0, 1);
    S[2] = Eigen::Vector3d(1, k.origin[0].y(), -k.origin[0].x());
  }
  for (int j = 1; j < nj; ++j) {
    const int c = coord_of_joint_[j];
    if (c < 0) continue;
    S[c] = axis_sign_[j] * Eigen::Vector3d(1, k.origin[j].y(), -k.origin[j].x());
    owner[c] = j;
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    const Eigen::Vector3d F = composite[owner[b]] * S[b];
    for (int a = 0; a <= b; ++a) {
      const bool a_is_root = a < num_root_;
      const bool ancestor = a_is_root || std::find(ancestors_[owner[b]].begin(), ancestors_[owner[b]].end(),
                                                   owner[a]) != ancestors_[owner[b]].end();
      if (b < num_root_ && !a_is_root) continue;
      if (!ancestor) continue;
      M(a, b) = S[a].dot(F);
      M(b, a) = M(a, b);
    }
  }
  return M;
}

void PlanarEngine::add_point_force(const Kinematics2D& k, int body, const Vec2& p, const Vec2& F,
                                   Eigen::VectorXd& f) const {
  if (num_root_ == 3) {
    f[0] += F.x();
    f[1] += F.y();
    f[2] += perp(p - k.origin[0]).dot(F);
  }
  for (int a : ancestors_[body]) {
    const int c = coord_of_joint_[a];
    if (c < 0) continue;
    f[c] += axis_sign_[a] * perp(p - k.origin[a]).dot(F);
  }
}

Eigen::VectorXd PlanarEngine::bias_forces(const Kinematics2D& k) const {
  const auto& ch = *character_;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(num_coords());
  for (int j = 0; j < ch.num_joints(); ++j) {
    const double m = ch.bodies()[j].mass;
    add_point_force(k, j, k.com[j], m * (k.com_acc_vp[j] - gravity_), h);
  }
  return h;
}

Eigen::VectorXd PlanarEngine::contact_forces(const Kinematics2D& k) const {
  const auto& ch = *character_;
  const auto& cp = config_.contact;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(num_coords());
  for (int j = 0; j < ch.num_joints(); ++j) {
    for (const auto& [local, radius] : contact_points_[j]) {
      const Vec2 p = k.origin[j] + rotate2(k.angle[j], local);
      const double depth = config_.ground_height - (p.y() - radius);
      if (depth <= 0.0) continue;
      const Vec2 v = k.origin_vel[j] + k.omega[j] * perp(p - k.origin[j]);
      const double fn = std::max(0.0, cp.normal_stiffness * depth - cp.normal_damping * v.y());
      const double cap = cp.friction * fn;
      const double ft = std::clamp(-cp.tangent_damping * v.x(), -cap, cap);
      add_point_force(k, j, p, Vec2(ft, fn), f);
    }
  }
  return f;
}

Eigen::MatrixXd PlanarEngine::mass_matrix(const SimState& s) const {
  return mass_matrix(compute_kinematics(s, coords(s), coord_velocities(s)));
}

Eigen::VectorXd PlanarEngine::bias_forces(const SimState& s) const {
  return bias_forces(compute_kinematics(s, coords(s), coord_velocities(s)));
}

Eigen::VectorXd PlanarEngine::contact_forces(const SimState& s) const {
  return contact_forces(compute_kinematics(s, coords(s), coord_velocities(s)));
}

double PlanarEngine::total_energy(const SimState& s) const {
  const Eigen::VectorXd q = coords(s), qd = coord_velocities(s);
  const auto k = compute_kinematics(s, q, qd);
  double e = 0.5 * qd.dot(mass_matrix(k) * qd);
  for (int j = 0; j < character_->num_joints(); ++j) e -= character_->bodies()[j].mass * gravity_.dot(k.com[j]);
  return e;
}

Eigen::VectorXd PlanarEngine::joint_torques(const SimState& s, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                            const Eigen::VectorXd& command) const {
  (void)s;
  const auto& ch = *character_;
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(num_coords());
  for (int j = 1; j < ch.num_joints(); ++j) {
    const int c = coord_of_joint_[j];
    if (c < 0) continue;
    const auto& js = ch.joint(j);
    const double cmd = command[ch.dof_offset(j)];
    switch (config_.control_mode) {
      case ControlMode::torque:
        tau[c] = std::clamp(cmd, -js.torque_limit, js.torque_limit);
        break;
      case ControlMode::pos:
      case ControlMode::pd_1d:
        tau[c] = pd_torque(q[c], qd[c], cmd, js.pd_gains, js.torque_limit);
        break;
      default:
        break;
    }
  }
  return tau;
}

void PlanarEngine::advance(int, SimState& s, const Eigen::VectorXd& command) {
  const double dt = config_.sim_dt();
  const int substeps = config_.substeps();
  const int n = num_coords();
  const int nd = character_->dof_count();
  Eigen::VectorXd q = coords(s);
  Eigen::VectorXd qd = coord_velocities(s);
  const bool prescribed = config_.control_mode == ControlMode::vel;

  for (int step = 0; step < substeps; ++step) {
    const auto k = compute_kinematics(s, q, qd);
    const Eigen::MatrixXd M = mass_matrix(k);
    const Eigen::VectorXd rhs = joint_torques(s, q, qd, command) + contact_forces(k) - bias_forces(k);
    Eigen::VectorXd qdd(n);
    if (!prescribed) {
      qdd = M.ldlt().solve(rhs);
    } else {
      // Joint rates are imposed; the floating root responds through its rows of M.
      qdd.tail(nd) = (command - qd.tail(nd)) / dt;
      if (num_root_ > 0) {
        const Eigen::VectorXd r = rhs.head(num_root_) - M.topRightCorner(num_root_, nd) * qdd.tail(nd);
        qdd.head(num_root_) = M.topLeftCorner(num_root_, num_root_).ldlt().solve(r);
      }
    }
    qd += qdd * dt;
    if (prescribed) qd.tail(nd) = command;
    q += qd * dt;
  }
  apply_coords(s, q, qd);
}

}  // namespace imitate::engine

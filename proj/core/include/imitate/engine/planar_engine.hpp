#pragma once

#include <vector>

#include <Eigen/Core>

#include "imitate/engine/engine.hpp"

namespace imitate::engine {

/// Reduced-coordinate dynamics for planar characters.
///
/// Motion lies in the x-y plane with y up. Non-root joints are revolute about
/// +-z (or fixed); the root is fixed or floating with coordinates (x, y, heading).
/// The mass matrix comes from the composite-rigid-body recursion in world
/// coordinates and is solved directly each substep; integration is semi-implicit
/// Euler with `substeps` inner steps per control period.
class PlanarEngine final : public Engine {
 public:
  PlanarEngine(std::shared_ptr<const kin::CharacterModel> character, EngineConfig config, int num_envs);

  /// Root coordinates (x, y, heading when floating) followed by joint angles.
  int num_coords() const { return num_root_ + character_->dof_count(); }
  Eigen::VectorXd coords(const SimState& s) const;
  Eigen::VectorXd coord_velocities(const SimState& s) const;
  /// Writes q and qdot back into `s` (root and joint entries).
  void apply_coords(SimState& s, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;

  Eigen::MatrixXd mass_matrix(const SimState& s) const;
  /// Velocity-product and gravity terms h(q, qdot) in M qdd + h = tau.
  Eigen::VectorXd bias_forces(const SimState& s) const;
  /// Generalized ground-contact forces.
  Eigen::VectorXd contact_forces(const SimState& s) const;
  /// Kinetic plus gravitational potential energy.
  double total_energy(const SimState& s) const;

 protected:
  void advance(int env, SimState& s, const Eigen::VectorXd& command) override;

 private:
  struct Kinematics2D {
    std::vector<Eigen::Vector2d> origin;  // joint frame origins
    std::vector<double> angle;            // joint frame angles
    std::vector<Eigen::Vector2d> com;     // body COMs
    std::vector<double> omega;            // body angular velocities
    std::vector<Eigen::Vector2d> origin_vel;
    std::vector<Eigen::Vector2d> com_acc_vp;  // velocity-product COM accelerations
  };

  Kinematics2D compute_kinematics(const SimState& s, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const;
  Eigen::MatrixXd mass_matrix(const Kinematics2D& k) const;
  Eigen::VectorXd bias_forces(const Kinematics2D& k) const;
  Eigen::VectorXd contact_forces(const Kinematics2D& k) const;
  /// Adds J_p^T F for point p on body `body` into f.
  void add_point_force(const Kinematics2D& k, int body, const Eigen::Vector2d& p, const Eigen::Vector2d& F,
                       Eigen::VectorXd& f) const;
  Eigen::VectorXd joint_torques(const SimState& s, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                const Eigen::VectorXd& command) const;

  int num_root_ = 0;
  std::vector<double> axis_sign_;             // +-1 per joint, 0 for fixed/root
  std::vector<int> coord_of_joint_;           // coordinate index of each revolute joint, -1 otherwise
  std::vector<std::vector<int>> ancestors_;   // joint ancestors including self, root first
  std::vector<std::vector<int>> subtree_;     // joint subtree including self
  std::vector<std::vector<std::pair<Eigen::Vector2d, double>>> contact_points_;
  Eigen::Vector2d gravity_;
};

}  // namespace imitate::engine

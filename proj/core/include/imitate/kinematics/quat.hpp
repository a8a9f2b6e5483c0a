#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace imitate::kin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion stored as (w, x, y, z).
///
/// The four-argument constructor normalizes its input; products of unit
/// quaternions are kept as computed (their norm drifts only at rounding level).
class Quat {
 public:
  Quat() = default;
  /// Normalizes (w, x, y, z). Throws InvalidArgument on non-finite or zero input.
  Quat(double w, double x, double y, double z);

  static Quat identity() { return {}; }
  static Quat from_axis_angle(const Vec3& axis, double angle);
  static Quat from_matrix(const Mat3& m);
  /// Restores stored components bit-exactly (no renormalization). Throws unless
  /// finite and within 1e-6 of unit norm.
  static Quat from_stored(double w, double x, double y, double z);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  Vec3 vec() const { return {x_, y_, z_}; }

  double norm() const;
  Quat normalized() const { return {w_, x_, y_, z_}; }
  Quat conjugate() const { return raw(w_, -x_, -y_, -z_); }
  Quat inverse() const { return conjugate(); }
  /// Same rotation with w >= 0.
  Quat canonical() const;
  Quat negated() const { return raw(-w_, -x_, -y_, -z_); }

  Vec3 rotate(const Vec3& v) const;
  Mat3 to_matrix() const;
  double dot(const Quat& o) const { return w_ * o.w_ + x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }

  friend Quat operator*(const Quat& a, const Quat& b);
  friend bool operator==(const Quat&, const Quat&) = default;

 private:
  static Quat raw(double w, double x, double y, double z) {
    Quat q;
    q.w_ = w;
    q.x_ = x;
    q.y_ = y;
    q.z_ = z;
    return q;
  }

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Rotation of angle |v| about v/|v|. Non-finite input throws InvalidArgument.
Quat exp_map_to_quat(const Vec3& v);

/// Inverse of exp_map_to_quat on the canonical hemisphere; output magnitude in [0, pi].
/// Throws InvalidArgument when |q| deviates from 1 by more than 1e-6.
Vec3 quat_to_exp_map(const Quat& q);

/// Shortest-arc interpolation. Throws InvalidArgument for u outside [0, 1].
Quat slerp(const Quat& q0, const Quat& q1, double u);

/// Geodesic angle between two rotations, in [0, pi].
double rotation_distance(const Quat& a, const Quat& b);

/// Rotation about the unit axis `up` that best matches q's heading.
/// The heading is measured from the image of the reference forward axis
/// projected onto the plane orthogonal to `up`.
Quat heading_rotation(const Quat& q, const Vec3& up);

/// First two columns of the rotation matrix, stacked (continuous 6D encoding).
Eigen::Matrix<double, 6, 1> tan_norm(const Quat& q);

}  // namespace imitate::kin

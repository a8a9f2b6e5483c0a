#include "imitate/kinematics/quat.hpp"

#include <cmath>
#include <numbers>

#include "imitate/util/error.hpp"

namespace imitate::kin {

Quat::Quat(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!std::isfinite(n) || n == 0.0) throw InvalidArgument("quaternion must be finite and non-zero");
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
}

Quat Quat::from_stored(double w, double x, double y, double z) {
  const Quat q = raw(w, x, y, z);
  if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) ||
      std::abs(q.norm() - 1.0) > 1e-6) {
    throw InvalidArgument("stored quaternion is not a finite unit quaternion");
  }
  return q;
}

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!std::isfinite(n) || n == 0.0 || !std::isfinite(angle)) {
    throw InvalidArgument("axis-angle must be finite with a non-zero axis");
  }
  const Vec3 a = axis / n;
  const double s = std::sin(0.5 * angle);
  return raw(std::cos(0.5 * angle), s * a.x(), s * a.y(), s * a.z());
}

Quat Quat::from_matrix(const Mat3& m) {
  // Shepperd's method: pivot on the largest diagonal combination.
  const double trace = m.trace();
  double w, x, y, z;
  if (trace > m(0, 0) && trace > m(1, 1) && trace > m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    w = 0.25 * s;
    x = (m(2, 1) - m(1, 2)) / s;
    y = (m(0, 2) - m(2, 0)) / s;
    z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2));
    w = (m(2, 1) - m(1, 2)) / s;
    x = 0.25 * s;
    y = (m(0, 1) + m(1, 0)) / s;
    z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2));
    w = (m(0, 2) - m(2, 0)) / s;
    x = (m(0, 1) + m(1, 0)) / s;
    y = 0.25 * s;
    z = (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1));
    w = (m(1, 0) - m(0, 1)) / s;
    x = (m(0, 2) + m(2, 0)) / s;
    y = (m(1, 2) + m(2, 1)) / s;
    z = 0.25 * s;
  }
  return Quat(w, x, y, z).canonical();
}

double Quat::norm() const { return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_); }

Quat Quat::canonical() const { return w_ < 0.0 ? negated() : *this; }

Vec3 Quat::rotate(const Vec3& v) const {
  const Vec3 u(x_, y_, z_);
  const Vec3 t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

Mat3 Quat::to_matrix() const {
  Mat3 m;
  const double xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  m << 1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy),
       2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx),
       2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy);
  return m;
}

Quat operator*(const Quat& a, const Quat& b) {
  return Quat::raw(a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_,
                   a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_,
                   a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_,
                   a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_);
}

Quat exp_map_to_quat(const Vec3& v) {
  if (!v.allFinite()) throw InvalidArgument("exponential map must be finite");
  const double angle = v.norm();
  if (angle < 1e-8) {
    // sin(a/2)/a -> 1/2 as a -> 0
    return Quat(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z());
  }
  const double s = std::sin(0.5 * angle) / angle;
  return Quat(std::cos(0.5 * angle), s * v.x(), s * v.y(), s * v.z());
}

Vec3 quat_to_exp_map(const Quat& q) {
  if (!std::isfinite(q.norm()) || std::abs(q.norm() - 1.0) > 1e-6) {
    throw InvalidArgument("quat_to_exp_map requires a unit quaternion");
  }
  const Quat c = q.canonical();
  const Vec3 u = c.vec();
  const double s = u.norm();
  if (s < 1e-8) {
    // angle/s -> 2/w as s -> 0
    return (2.0 / c.w()) * u;
  }
  const double angle = 2.0 * std::atan2(s, c.w());
  return (angle / s) * u;
}

Quat slerp(const Quat& q0, const Quat& q1, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidArgument("slerp parameter must lie in [0, 1]");
  if (u == 0.0) return q0;
  if (u == 1.0) return q1;
  double d = q0.dot(q1);
  const Quat target = d < 0.0 ? q1.negated() : q1;
  d = std::abs(d);
  double a, b;
  if (d > 1.0 - 1e-7) {
    a = 1.0 - u;
    b = u;
  } else {
    const double theta = std::acos(d);
    const double st = std::sin(theta);
    a = std::sin((1.0 - u) * theta) / st;
    b = std::sin(u * theta) / st;
  }
  return Quat(a * q0.w() + b * target.w(), a * q0.x() + b * target.x(), a * q0.y() + b * target.y(),
              a * q0.z() + b * target.z());
}

double rotation_distance(const Quat& a, const Quat& b) {
  const Quat d = a.conjugate() * b;
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

Quat heading_rotation(const Quat& q, const Vec3& up) {
  // Reference forward axis: any unit axis orthogonal to `up`, preferring x.
  Vec3 forward = Vec3::UnitX();
  if (std::abs(up.dot(forward)) > 0.9) forward = Vec3::UnitY();
  forward = (forward - up.dot(forward) * up).normalized();
  const Vec3 side = up.cross(forward);
  const Vec3 f = q.rotate(forward);
  const double angle = std::atan2(f.dot(side), f.dot(forward));
  return Quat::from_axis_angle(up, angle);
}

Eigen::Matrix<double, 6, 1> tan_norm(const Quat& q) {
  const Mat3 m = q.to_matrix();
  Eigen::Matrix<double, 6, 1> out;
  out << m.col(0), m.col(1);
  return out;
}

}  // namespace imitate::kin

#include "wavecatch/frames.hpp"

#include <cmath>

#include "wavecatch/errors.hpp"

namespace wavecatch {

namespace {
constexpr double kPitchGuard = M_PI / 2.0 - 1e-6;
}

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z)
    : w_(w), x_(x), y_(y), z_(z) {
  normalize_and_canonicalize();
}

void UnitQuaternion::normalize_and_canonicalize() {
  const double n = std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericError("UnitQuaternion: cannot normalize zero or non-finite quaternion");
  }
  w_ /= n;
  x_ /= n;
  y_ /= n;
  z_ /= n;
  // Canonical sign: w >= 0, ties broken on the first nonzero vector entry.
  bool flip = w_ < 0.0;
  if (w_ == 0.0) {
    if (x_ != 0.0) {
      flip = x_ < 0.0;
    } else if (y_ != 0.0) {
      flip = y_ < 0.0;
    } else {
      flip = z_ < 0.0;
    }
  }
  if (flip) {
    w_ = -w_;
    x_ = -x_;
    y_ = -y_;
    z_ = -z_;
  }
}

UnitQuaternion UnitQuaternion::from_rotation_vector(const Eigen::Vector3d& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) {
    // Series: sin(a/2)/a ~ 1/2 - a^2/48.
    const double k = 0.5 - angle * angle / 48.0;
    return UnitQuaternion(1.0, rotvec.x() * k, rotvec.y() * k, rotvec.z() * k);
  }
  const double half = 0.5 * angle;
  const double s = std::sin(half) / angle;
  return UnitQuaternion(std::cos(half), rotvec.x() * s, rotvec.y() * s, rotvec.z() * s);
}

UnitQuaternion UnitQuaternion::from_rotation_matrix(const Eigen::Matrix3d& rot) {
  // Shepperd's method: pick the largest diagonal combination for stability.
  const double tr = rot.trace();
  double w, x, y, z;
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    w = 0.25 * s;
    x = (rot(2, 1) - rot(1, 2)) / s;
    y = (rot(0, 2) - rot(2, 0)) / s;
    z = (rot(1, 0) - rot(0, 1)) / s;
  } else if (rot(0, 0) > rot(1, 1) && rot(0, 0) > rot(2, 2)) {
    double s = std::sqrt(1.0 + rot(0, 0) - rot(1, 1) - rot(2, 2)) * 2.0;
    w = (rot(2, 1) - rot(1, 2)) / s;
    x = 0.25 * s;
    y = (rot(0, 1) + rot(1, 0)) / s;
    z = (rot(0, 2) + rot(2, 0)) / s;
  } else if (rot(1, 1) > rot(2, 2)) {
    double s = std::sqrt(1.0 + rot(1, 1) - rot(0, 0) - rot(2, 2)) * 2.0;
    w = (rot(0, 2) - rot(2, 0)) / s;
    x = (rot(0, 1) + rot(1, 0)) / s;
    y = 0.25 * s;
    z = (rot(1, 2) + rot(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + rot(2, 2) - rot(0, 0) - rot(1, 1)) * 2.0;
    w = (rot(1, 0) - rot(0, 1)) / s;
    x = (rot(0, 2) + rot(2, 0)) / s;
    y = (rot(1, 2) + rot(2, 1)) / s;
    z = 0.25 * s;
  }
  return UnitQuaternion(w, x, y, z);
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& rhs) const {
  return UnitQuaternion(
      w_ * rhs.w_ - x_ * rhs.x_ - y_ * rhs.y_ - z_ * rhs.z_,
      w_ * rhs.x_ + x_ * rhs.w_ + y_ * rhs.z_ - z_ * rhs.y_,
      w_ * rhs.y_ - x_ * rhs.z_ + y_ * rhs.w_ + z_ * rhs.x_,
      w_ * rhs.z_ + x_ * rhs.y_ - y_ * rhs.x_ + z_ * rhs.w_);
}

Eigen::Vector3d UnitQuaternion::rotate(const Eigen::Vector3d& v) const {
  // v' = v + 2 w (u x v) + 2 u x (u x v)
  const Eigen::Vector3d u(x_, y_, z_);
  const Eigen::Vector3d t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

Eigen::Matrix3d UnitQuaternion::to_rotation_matrix() const {
  Eigen::Matrix3d rot;
  const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  rot << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
      2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
      2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return rot;
}

Eigen::Vector3d UnitQuaternion::to_rotation_vector() const {
  const Eigen::Vector3d v(x_, y_, z_);
  const double s = v.norm();
  if (s < 1e-9) {
    // angle/sin(angle/2) ~ 2/w * (1 - s^2/(3 w^2)) for small s, w ~ 1.
    return v * (2.0 / w_) * (1.0 - s * s / (3.0 * w_ * w_));
  }
  const double angle = 2.0 * std::atan2(s, w_);
  return v * (angle / s);
}

bool UnitQuaternion::approx_equal(const UnitQuaternion& rhs, double tol) const {
  return std::abs(w_ - rhs.w_) <= tol && std::abs(x_ - rhs.x_) <= tol &&
         std::abs(y_ - rhs.y_) <= tol && std::abs(z_ - rhs.z_) <= tol;
}

Pose6 Pose6::compose(const Pose6& rhs) const {
  Pose6 out;
  out.position = position + orientation.rotate(rhs.position);
  out.orientation = orientation * rhs.orientation;
  return out;
}

Pose6 Pose6::inverse() const {
  Pose6 out;
  out.orientation = orientation.inverse();
  out.position = -out.orientation.rotate(position);
  return out;
}

Eigen::Vector3d Pose6::apply(const Eigen::Vector3d& p) const {
  return position + orientation.rotate(p);
}

Eigen::Matrix4d Pose6::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = orientation.to_rotation_matrix();
  m.topRightCorner<3, 1>() = position;
  return m;
}

Eigen::Matrix3d euler_to_rotation(const EulerAngles& angles) {
  if (std::abs(angles.pitch) >= kPitchGuard) {
    throw DegenerateAnglesError("euler_to_rotation: pitch within 1e-6 of +-pi/2");
  }
  const double cr = std::cos(angles.roll), sr = std::sin(angles.roll);
  const double cp = std::cos(angles.pitch), sp = std::sin(angles.pitch);
  const double cy = std::cos(angles.yaw), sy = std::sin(angles.yaw);
  // R = Rz(yaw) Ry(pitch) Rx(roll)
  Eigen::Matrix3d rot;
  rot << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
      sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
      -sp, cp * sr, cp * cr;
  return rot;
}

EulerAngles rotation_to_euler(const Eigen::Matrix3d& rot) {
  const double sp = -rot(2, 0);
  if (std::abs(sp) >= std::sin(kPitchGuard)) {
    throw DegenerateAnglesError("rotation_to_euler: pitch within 1e-6 of +-pi/2");
  }
  EulerAngles out;
  out.pitch = std::asin(sp);
  out.roll = std::atan2(rot(2, 1), rot(2, 2));
  out.yaw = std::atan2(rot(1, 0), rot(0, 0));
  return out;
}

Eigen::Vector3d rotate_body_to_inertial(const Eigen::Matrix3d& rot, const Eigen::Vector3d& v_body) {
  return rot * v_body;
}

Vector6d pose_error(const Pose6& actual, const Pose6& target) {
  Vector6d err;
  err.head<3>() = actual.position - target.position;
  err.tail<3>() = (target.orientation.inverse() * actual.orientation).to_rotation_vector();
  return err;
}

UnitQuaternion quaternion_from_euler(const EulerAngles& angles) {
  return UnitQuaternion::from_rotation_matrix(euler_to_rotation(angles));
}

EulerAngles euler_from_quaternion(const UnitQuaternion& q) {
  return rotation_to_euler(q.to_rotation_matrix());
}

}  // namespace wavecatch

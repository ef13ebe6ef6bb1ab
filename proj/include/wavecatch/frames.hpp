#pragma once

#include <Eigen/Dense>

#include "wavecatch/types.hpp"

namespace wavecatch {

/// Unit quaternion, Hamilton convention, scalar-first. The double cover is
/// resolved by keeping w >= 0: every public operation returns the canonical
/// representative, normalized to 1e-9 or better.
class UnitQuaternion {
 public:
  UnitQuaternion() : w_(1.0), x_(0.0), y_(0.0), z_(0.0) {}
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion identity() { return UnitQuaternion(); }

  /// exp map: rotation vector (axis * angle, radians) -> quaternion.
  static UnitQuaternion from_rotation_vector(const Eigen::Vector3d& rotvec);
  static UnitQuaternion from_rotation_matrix(const Eigen::Matrix3d& rot);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  /// Hamilton product (this ∘ rhs): applies rhs first, then this.
  UnitQuaternion operator*(const UnitQuaternion& rhs) const;

  UnitQuaternion conjugate() const { return UnitQuaternion(w_, -x_, -y_, -z_); }
  UnitQuaternion inverse() const { return conjugate(); }

  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const;
  Eigen::Matrix3d to_rotation_matrix() const;

  /// log map: canonical quaternion -> rotation vector with angle in [0, pi].
  Eigen::Vector3d to_rotation_vector() const;

  double norm() const { return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_); }

  bool approx_equal(const UnitQuaternion& rhs, double tol = 1e-9) const;

 private:
  void normalize_and_canonicalize();

  double w_, x_, y_, z_;
};

/// Z-Y-X (yaw-pitch-roll) Euler angles. Pitch restricted to (-pi/2, pi/2).
struct EulerAngles {
  double roll = 0.0;   // rad, about x
  double pitch = 0.0;  // rad, about y
  double yaw = 0.0;    // rad, about z
};

/// Rigid pose: position in meters plus orientation.
struct Pose6 {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  UnitQuaternion orientation;

  /// this ∘ rhs as rigid transforms.
  Pose6 compose(const Pose6& rhs) const;
  Pose6 inverse() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const;
  Eigen::Matrix4d matrix() const;
};

/// Rotation matrix from Z-Y-X Euler angles: R = Rz(yaw) Ry(pitch) Rx(roll).
/// Throws DegenerateAnglesError when |pitch| >= pi/2 - 1e-6.
Eigen::Matrix3d euler_to_rotation(const EulerAngles& angles);

/// Inverse of euler_to_rotation on the restricted pitch domain.
EulerAngles rotation_to_euler(const Eigen::Matrix3d& rot);

/// Maps a body-frame vector to the inertial frame. Pure function.
Eigen::Vector3d rotate_body_to_inertial(const Eigen::Matrix3d& rot, const Eigen::Vector3d& v_body);

/// 6-vector pose error, actual - target convention: first three components
/// are the position difference, last three the rotation vector (axis-angle)
/// of q_target^-1 * q_actual. Zero iff the poses are equal.
Vector6d pose_error(const Pose6& actual, const Pose6& target);

UnitQuaternion quaternion_from_euler(const EulerAngles& angles);
EulerAngles euler_from_quaternion(const UnitQuaternion& q);

}  // namespace wavecatch

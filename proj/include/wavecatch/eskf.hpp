#pragma once

#include <optional>
#include <vector>

#include "wavecatch/frames.hpp"
#include "wavecatch/types.hpp"

namespace wavecatch {

enum class MotionModelKind { ConstantVelocity, ConstantAcceleration };

/// Target process model: white-noise acceleration (CV) or white-noise jerk
/// (CA) plus an attitude random walk.
struct TargetMotionModel {
  MotionModelKind kind = MotionModelKind::ConstantVelocity;
  /// (m/s^2)^2/Hz per axis for CV; interpreted as jerk density for CA.
  double accel_noise_density = 0.5;
  /// (rad/s)^2/Hz per axis.
  double attitude_rw_density = 0.01;

  void validate() const;
  int error_dim() const { return kind == MotionModelKind::ConstantVelocity ? 9 : 12; }
};

/// Position measurement with optional orientation; stamps must be
/// nondecreasing across a feed.
struct Measurement {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::optional<UnitQuaternion> orientation;
  double stamp_s = 0.0;
  /// Optional override of the filter's measurement covariance; dimension
  /// must match (3 position-only, 6 with orientation).
  std::optional<Eigen::MatrixXd> r_override;
};

/// Error-state Kalman filter state. The nominal carries the quaternion;
/// the error state is minimal (3-vector attitude error) and identically
/// zero between updates (reset-into-nominal convention). Error ordering:
/// [position, velocity, (acceleration,) attitude].
struct ErrorFilterState {
  TargetMotionModel model;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();  // used iff CA
  UnitQuaternion orientation;
  double stamp_s = 0.0;
  Eigen::MatrixXd covariance;     // 9x9 (CV) or 12x12 (CA), symmetric PSD
  Eigen::Matrix3d r_position = 2.5e-5 * Eigen::Matrix3d::Identity();   // (5 mm)^2
  Eigen::Matrix3d r_attitude = 7.6e-5 * Eigen::Matrix3d::Identity();   // (0.5 deg)^2

  static ErrorFilterState create(const TargetMotionModel& model,
                                 const Eigen::Vector3d& position,
                                 const Eigen::Vector3d& velocity,
                                 double sigma_pos = 0.1, double sigma_vel = 0.5,
                                 double sigma_att = 0.2);
};

struct UpdateResult {
  ErrorFilterState state;
  Eigen::VectorXd innovation;
  Eigen::MatrixXd innovation_covariance;
  double nis = 0.0;             // innovation^T S^-1 innovation
  bool singular = false;        // set when S was not invertible; state unchanged
};

/// Exact per-step process noise for the chosen model (closed-form
/// discretization of the white-noise densities).
Eigen::MatrixXd process_noise(const TargetMotionModel& model, double dt);

/// State transition for the error state (and the nominal linear part).
Eigen::MatrixXd transition_matrix(const TargetMotionModel& model, double dt);

/// Nominal propagation plus P <- F P F^T + Q_n, symmetry re-enforced.
ErrorFilterState predict(const ErrorFilterState& state, double dt);

/// Measurement update: Kalman gain on the error state, Joseph-form
/// covariance, ⊕-composition into the nominal, error reset to zero.
UpdateResult update(const ErrorFilterState& state, const Measurement& z);

struct PredictedSample {
  double offset_s = 0.0;
  Pose6 pose;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

struct Extrapolation {
  std::vector<PredictedSample> samples;       // steps + 1 entries
  Eigen::MatrixXd final_covariance;           // diagnostic only
};

/// Nominal-only propagation over the lead time alpha, sampled at
/// steps + 1 equally spaced offsets (0, alpha/steps, ..., alpha).
/// Requires 0 < alpha <= 2 s.
Extrapolation extrapolate(const ErrorFilterState& state, double alpha_s, int steps);

}  // namespace wavecatch

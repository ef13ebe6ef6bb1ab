#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wavecatch/frames.hpp"
#include "wavecatch/types.hpp"

namespace wavecatch {

/// One modified-DH row (Craig convention):
/// T_i = RotX(alpha) TransX(a) RotZ(theta + offset) TransZ(d).
struct DhRow {
  double a_m = 0.0;
  double alpha_rad = 0.0;
  double d_m = 0.0;
  double theta_offset_rad = 0.0;
};

/// 7-DoF serial manipulator: kinematic chain, joint/velocity limits, the
/// scalar acceleration-norm bound, and the end-effector workspace box
/// expressed in the deck frame.
struct ArmModel {
  std::array<DhRow, kArmDof> dh{};
  Vector7d q_min_rad;
  Vector7d q_max_rad;
  Vector7d qd_max_rad_s;      // symmetric velocity limits
  double u_norm_max_rad_s2 = 25.0;
  Eigen::Vector3d workspace_min_m = Eigen::Vector3d(-0.95, -0.95, 0.05);
  Eigen::Vector3d workspace_max_m = Eigen::Vector3d(0.95, 0.95, 1.35);

  void validate() const;

  bool workspace_contains(const Eigen::Vector3d& deck_position, double tol = 0.0) const;

  /// Anthropomorphic S-R-S chain with alternating +-pi/2 twists and link
  /// offsets (0.34, 0, 0.40, 0, 0.40, 0, 0.126) m; the defaults every
  /// scenario starts from.
  static ArmModel standard_seven_dof();
};

struct JointState {
  Vector7d q = Vector7d::Zero();       // rad
  Vector7d q_dot = Vector7d::Zero();   // rad/s
  double stamp_s = 0.0;
};

/// Exact discrete double integrator z_{k+1} = A z_k + B u_k with
/// z = [q, q_dot] and u the joint accelerations.
struct DiscreteModel {
  Eigen::Matrix<double, 14, 14> a;
  Eigen::Matrix<double, 14, 7> b;
  double dt_s = 0.0;
  /// Set when dt is legal but outside the nominal 0.025-0.05 s band.
  bool dt_outside_nominal = false;

  JointState step(const JointState& z, const Vector7d& u) const;
};

/// A = [[I, dt I], [0, I]], B = [[dt^2/2 I], [dt I]] exactly.
/// Throws ConfigError for dt <= 0.
DiscreteModel build_discrete_model(double dt_s);

/// End-effector pose in the inertial frame: base ∘ (product of the seven
/// link transforms).
Pose6 forward_kinematics(const ArmModel& model, const Vector7d& q, const Pose6& base);

/// 6x7 geometric Jacobian mapping joint rates to the end-effector twist
/// (linear; angular) in the inertial frame.
Eigen::Matrix<double, 6, 7> geometric_jacobian(const ArmModel& model, const Vector7d& q,
                                               const Pose6& base);

enum class LimitKind { Position, Velocity, AccelerationNorm, Workspace };

struct LimitViolation {
  LimitKind kind;
  int index;        // joint index, or workspace axis; -1 for the norm bound
  double value;
  double bound;
  double margin;    // positive amount by which the bound is exceeded
  std::string describe() const;
};

struct LimitReport {
  std::vector<LimitViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Lists every violated constraint with margins. Bounds are closed:
/// a value exactly on the bound is not a violation.
LimitReport check_limits(const ArmModel& model, const Vector7d& q, const Vector7d& q_dot,
                         const Vector7d& u);

/// Closed-form ready pose for the standard chain: end-effector level (deck
/// frame) at the requested position, gripper opening upward. Returns
/// nullopt outside the reachable annulus or the joint limits.
std::optional<Vector7d> level_catch_ik(const ArmModel& model,
                                       const Eigen::Vector3d& deck_position);

}  // namespace wavecatch

#pragma once

#include <optional>
#include <vector>

#include "wavecatch/arm.hpp"
#include "wavecatch/frames.hpp"
#include "wavecatch/types.hpp"

namespace wavecatch {

/// Weights of the task-space tracking cost
///   J = sum ||x_e[k] - target[k]||^2_Q + sum ||u_k||^2_R
///       + ||x_e[H] - target[H]||^2_QN.
struct CostWeights {
  Matrix6d q_stage = Matrix6d::Identity();
  Matrix7d r_control = 1e-3 * Matrix7d::Identity();
  Matrix6d q_terminal = Matrix6d::Identity();

  /// Q, Q_N PSD (eigenvalues >= -1e-10); R PD (eigenvalues >= 1e-10).
  void validate() const;

  static CostWeights diagonal(double q_pos, double q_ori, double r_u, double qn_pos,
                              double qn_ori);
};

enum class AccelConstraintMode {
  /// Per-step box |u_i| <= u_max/sqrt(7); keeps the QP linear and implies
  /// the Euclidean bound.
  ConservativeBox,
  /// Outer box |u_i| <= u_max plus supporting-hyperplane cuts regenerated
  /// each pass until the Euclidean ball holds.
  ExactBall,
};

struct SolverOptions {
  int max_passes = 3;             // relinearization passes
  double cost_decrease_tol = 1e-6;
  double tikhonov = 1e-8;         // added to R for unique optima
  AccelConstraintMode accel_mode = AccelConstraintMode::ConservativeBox;
  double workspace_margin_m = 0.002;
  int max_ball_cuts = 10;
  double kkt_tol = 1e-6;
};

/// Result of one horizon optimization. Predicted states satisfy the
/// discrete-model recursion exactly; when `feasible` is set the plan passed
/// the independent constraint audit at 1e-6.
struct HorizonPlan {
  std::vector<Vector7d> controls;     // u_0 .. u_{h-1}
  std::vector<JointState> states;     // z_0 .. z_h
  std::vector<Pose6> ee_poses;        // inertial frame, h+1 entries
  double cost = 0.0;
  int solver_iterations = 0;
  int relinearization_passes = 0;
  double solve_time_s = 0.0;
  bool feasible = false;
  double kkt_residual = 0.0;

  int horizon() const { return static_cast<int>(controls.size()); }
};

/// Exact weighted sum of the cost above; pose differences via pose_error.
/// target_trajectory must have controls+1 entries.
double evaluate_cost(const HorizonPlan& plan, const std::vector<Pose6>& target_trajectory,
                     const CostWeights& weights);

/// Sequential-linearization horizon solve: FK linearized with the geometric
/// Jacobian around the warm-start rollout (zero controls when absent),
/// convex QP in the stacked accelerations, up to max_passes relinearizations
/// with an accept-only-improvement line search. Infeasible subproblems
/// return the last feasible rollout flagged infeasible.
HorizonPlan solve_horizon(const JointState& z0, const std::vector<Pose6>& target_trajectory,
                          const std::vector<Pose6>& base_trajectory, const ArmModel& model,
                          const DiscreteModel& discrete, const CostWeights& weights, int h,
                          const std::optional<HorizonPlan>& warm = std::nullopt,
                          const SolverOptions& options = {});

/// Re-checks a plan against the true (non-linearized) constraints: joint and
/// velocity boxes, the Euclidean acceleration bound, and deck-frame
/// workspace membership of the exact FK positions.
bool audit_plan(const HorizonPlan& plan, const ArmModel& model, double tol = 1e-6);

struct FollowGains {
  double kp_pos = 25.0;
  double kd_pos = 10.0;
  double kp_ori = 25.0;
  double kd_ori = 10.0;
  double dls_lambda = 0.05;
};

/// Reactive task-space PD on the current target pose mapped to joint
/// accelerations through a damped-least-squares pseudo-inverse, then norm-
/// clamped to the acceleration bound. No prediction, no optimization.
Vector7d simple_following_step(const JointState& z0, const Pose6& target_now,
                               const Vector6d& target_velocity, const ArmModel& model,
                               const Pose6& base, const FollowGains& gains);

/// Warm-start bookkeeping: previous solution shifted one step, last control
/// repeated when the new horizon is longer.
HorizonPlan shift_plan(const HorizonPlan& plan, int new_horizon);

struct FixedHorizonResult {
  Vector7d u0;
  HorizonPlan plan;
};

/// Full-length re-plan every call (thin wrapper over solve_horizon),
/// warm-started from the previous plan shifted in time.
FixedHorizonResult fixed_horizon_step(const JointState& z0,
                                      const std::vector<Pose6>& target_trajectory,
                                      const std::vector<Pose6>& base_trajectory,
                                      const ArmModel& model, const DiscreteModel& discrete,
                                      const CostWeights& weights, int horizon_steps,
                                      const std::optional<HorizonPlan>& previous,
                                      const SolverOptions& options = {});

/// Shrinking-horizon bookkeeping: steps remaining to the intercept deadline
/// plus the warm-start plan.
struct RhcState {
  int initial_horizon = 20;
  int remaining_steps = 20;
  std::optional<HorizonPlan> warm;

  static RhcState fresh(int horizon_steps);
  void reset();  // new 0.5 s window (deadline elapsed or capture confirmed)
};

struct ShrinkingHorizonResult {
  Vector7d u0;
  HorizonPlan plan;
  RhcState next;
};

/// Solves with the remaining-horizon length, applies the first control, and
/// decrements; the horizon resets to its initial value after reaching one.
ShrinkingHorizonResult shrinking_horizon_step(const RhcState& rhc, const JointState& z0,
                                              const std::vector<Pose6>& target_trajectory,
                                              const std::vector<Pose6>& base_trajectory,
                                              const ArmModel& model,
                                              const DiscreteModel& discrete,
                                              const CostWeights& weights,
                                              const SolverOptions& options = {});

/// Wave-severity gain adaptation: Q and Q_N scaled by
/// (1 + kappa * roll_amplitude / 5 deg).
CostWeights adapt_weights_to_sea(const CostWeights& weights, double roll_amplitude_rad,
                                 double kappa = 0.5);

}  // namespace wavecatch

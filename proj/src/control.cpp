#include "wavecatch/control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "wavecatch/errors.hpp"
#include "wavecatch/qp.hpp"

namespace wavecatch {

void CostWeights::validate() const {
  auto min_eig = [](const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
  };
  if (min_eig(q_stage) < -1e-10) throw ConfigError("CostWeights: Q must be PSD");
  if (min_eig(q_terminal) < -1e-10) throw ConfigError("CostWeights: Q_N must be PSD");
  if (min_eig(r_control) < 1e-10) throw ConfigError("CostWeights: R must be PD");
}

CostWeights CostWeights::diagonal(double q_pos, double q_ori, double r_u, double qn_pos,
                                  double qn_ori) {
  CostWeights w;
  w.q_stage.setZero();
  w.q_stage.topLeftCorner<3, 3>() = q_pos * Eigen::Matrix3d::Identity();
  w.q_stage.bottomRightCorner<3, 3>() = q_ori * Eigen::Matrix3d::Identity();
  w.q_terminal.setZero();
  w.q_terminal.topLeftCorner<3, 3>() = qn_pos * Eigen::Matrix3d::Identity();
  w.q_terminal.bottomRightCorner<3, 3>() = qn_ori * Eigen::Matrix3d::Identity();
  w.r_control = r_u * Matrix7d::Identity();
  return w;
}

double evaluate_cost(const HorizonPlan& plan, const std::vector<Pose6>& target_trajectory,
                     const CostWeights& weights) {
  const std::size_t h = plan.controls.size();
  if (plan.ee_poses.size() != h + 1 || target_trajectory.size() != h + 1) {
    throw ShapeError("evaluate_cost: plan and target trajectory lengths must match");
  }
  double j = 0.0;
  for (std::size_t k = 0; k < h; ++k) {
    const Vector6d e = pose_error(plan.ee_poses[k], target_trajectory[k]);
    j += e.dot(weights.q_stage * e);
    j += plan.controls[k].dot(weights.r_control * plan.controls[k]);
  }
  const Vector6d et = pose_error(plan.ee_poses[h], target_trajectory[h]);
  j += et.dot(weights.q_terminal * et);
  return j;
}

namespace {

struct Rollout {
  std::vector<JointState> states;  // h+1
  std::vector<Pose6> ee_poses;     // h+1, inertial
};

Rollout roll_out(const JointState& z0, const std::vector<Vector7d>& controls,
                 const std::vector<Pose6>& base_trajectory, const ArmModel& model,
                 const DiscreteModel& discrete) {
  Rollout r;
  const std::size_t h = controls.size();
  r.states.reserve(h + 1);
  r.ee_poses.reserve(h + 1);
  r.states.push_back(z0);
  r.ee_poses.push_back(forward_kinematics(model, z0.q, base_trajectory[0]));
  for (std::size_t k = 0; k < h; ++k) {
    r.states.push_back(discrete.step(r.states.back(), controls[k]));
    r.ee_poses.push_back(forward_kinematics(model, r.states.back().q, base_trajectory[k + 1]));
  }
  return r;
}

// One convex subproblem built around a linearization rollout.
struct QpData {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
};

// q_k(U) = q0 + k dt qd0 + dt^2 sum_{j<k} (k-j-1/2) u_j  — exact for the
// double integrator, so position/velocity constraints are linear in U.
QpData build_qp(const JointState& z0, const Rollout& lin,
                const std::vector<Pose6>& target_trajectory,
                const std::vector<Pose6>& base_trajectory, const ArmModel& model,
                const DiscreteModel& discrete, const CostWeights& weights, int h,
                const SolverOptions& options) {
  const int n = 7 * h;
  const double dt = discrete.dt_s;
  const double u_box = options.accel_mode == AccelConstraintMode::ConservativeBox
                           ? model.u_norm_max_rad_s2 / std::sqrt(7.0)
                           : model.u_norm_max_rad_s2;

  QpData qp;
  qp.hessian = Eigen::MatrixXd::Zero(n, n);
  qp.gradient = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < h; ++k) {
    qp.hessian.block<7, 7>(7 * k, 7 * k) =
        2.0 * (weights.r_control + options.tikhonov * Matrix7d::Identity());
  }

  const int rows_per_step = 14 + 14 + 14 + 6;
  qp.rows = Eigen::MatrixXd::Zero(rows_per_step * h, n);
  qp.rhs = Eigen::VectorXd::Zero(rows_per_step * h);
  int row = 0;

  Eigen::MatrixXd a_k(6, n);      // d(task error at k) / dU
  Eigen::MatrixXd pos_rows(3, n); // d(deck-frame ee position at k) / dU
  for (int k = 1; k <= h; ++k) {
    const Vector7d q_ball = z0.q + (k * dt) * z0.q_dot;
    const Matrix6d& w = (k == h) ? weights.q_terminal : weights.q_stage;

    const auto jac = geometric_jacobian(model, lin.states[k].q, base_trajectory[k]);
    a_k.setZero();
    for (int j = 0; j < k; ++j) {
      a_k.middleCols<7>(7 * j) = (dt * dt * (k - j - 0.5)) * jac;
    }
    const Vector6d ebar = pose_error(lin.ee_poses[k], target_trajectory[k]);
    const Vector6d b_k = ebar + jac * (q_ball - lin.states[k].q);
    qp.hessian.noalias() += 2.0 * a_k.transpose() * w * a_k;
    qp.gradient.noalias() += 2.0 * a_k.transpose() * (w * b_k);

    // Joint position box.
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < k; ++j) {
        const double c = dt * dt * (k - j - 0.5);
        qp.rows(row + i, 7 * j + i) = c;
        qp.rows(row + 7 + i, 7 * j + i) = -c;
      }
      qp.rhs(row + i) = model.q_min_rad(i) - q_ball(i);
      qp.rhs(row + 7 + i) = q_ball(i) - model.q_max_rad(i);
    }
    row += 14;
    // Velocity box.
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < k; ++j) {
        qp.rows(row + i, 7 * j + i) = dt;
        qp.rows(row + 7 + i, 7 * j + i) = -dt;
      }
      qp.rhs(row + i) = -model.qd_max_rad_s(i) - z0.q_dot(i);
      qp.rhs(row + 7 + i) = z0.q_dot(i) - model.qd_max_rad_s(i);
    }
    row += 14;
    // Acceleration box for u_{k-1}.
    for (int i = 0; i < 7; ++i) {
      qp.rows(row + i, 7 * (k - 1) + i) = 1.0;
      qp.rhs(row + i) = -u_box;
      qp.rows(row + 7 + i, 7 * (k - 1) + i) = -1.0;
      qp.rhs(row + 7 + i) = -u_box;
    }
    row += 14;
    // Workspace box on the deck-frame end-effector position, linearized.
    const Pose6 deck_pose = forward_kinematics(model, lin.states[k].q, Pose6{});
    const Eigen::Matrix<double, 3, 7> jv_deck =
        geometric_jacobian(model, lin.states[k].q, Pose6{}).topRows<3>();
    pos_rows.setZero();
    for (int j = 0; j < k; ++j) {
      pos_rows.middleCols<7>(7 * j) = (dt * dt * (k - j - 0.5)) * jv_deck;
    }
    const Eigen::Vector3d p_base = deck_pose.position + jv_deck * (q_ball - lin.states[k].q);
    const double margin = options.workspace_margin_m;
    for (int axis = 0; axis < 3; ++axis) {
      qp.rows.row(row + axis) = pos_rows.row(axis);
      qp.rhs(row + axis) = model.workspace_min_m(axis) + margin - p_base(axis);
      qp.rows.row(row + 3 + axis) = -pos_rows.row(axis);
      qp.rhs(row + 3 + axis) = p_base(axis) - (model.workspace_max_m(axis) - margin);
    }
    row += 6;
  }
  return qp;
}

std::vector<Vector7d> unstack(const Eigen::VectorXd& u_stacked, int h) {
  std::vector<Vector7d> out(static_cast<std::size_t>(h));
  for (int k = 0; k < h; ++k) out[static_cast<std::size_t>(k)] = u_stacked.segment<7>(7 * k);
  return out;
}

}  // namespace

bool audit_plan(const HorizonPlan& plan, const ArmModel& model, double tol) {
  const int h = plan.horizon();
  for (int k = 1; k <= h; ++k) {
    const auto& z = plan.states[static_cast<std::size_t>(k)];
    for (int i = 0; i < 7; ++i) {
      if (z.q(i) > model.q_max_rad(i) + tol || z.q(i) < model.q_min_rad(i) - tol) return false;
      if (std::abs(z.q_dot(i)) > model.qd_max_rad_s(i) + tol) return false;
    }
    const Eigen::Vector3d p = forward_kinematics(model, z.q, Pose6{}).position;
    if (!model.workspace_contains(p, tol)) return false;
  }
  for (const auto& u : plan.controls) {
    if (u.norm() > model.u_norm_max_rad_s2 + tol) return false;
  }
  return true;
}

HorizonPlan solve_horizon(const JointState& z0, const std::vector<Pose6>& target_trajectory,
                          const std::vector<Pose6>& base_trajectory, const ArmModel& model,
                          const DiscreteModel& discrete, const CostWeights& weights, int h,
                          const std::optional<HorizonPlan>& warm, const SolverOptions& options) {
  if (h < 1 || h > 100) throw ConfigError("solve_horizon: horizon must be in [1, 100]");
  if (target_trajectory.size() < static_cast<std::size_t>(h) + 1 ||
      base_trajectory.size() < static_cast<std::size_t>(h) + 1) {
    throw ShapeError("solve_horizon: trajectories must supply h+1 samples");
  }
  const std::vector<Pose6> targets(target_trajectory.begin(),
                                   target_trajectory.begin() + h + 1);
  const std::vector<Pose6> bases(base_trajectory.begin(), base_trajectory.begin() + h + 1);
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<Vector7d> u_best(static_cast<std::size_t>(h), Vector7d::Zero());
  if (warm && !warm->controls.empty()) {
    for (int k = 0; k < h; ++k) {
      u_best[static_cast<std::size_t>(k)] =
          warm->controls[std::min<std::size_t>(k, warm->controls.size() - 1)];
    }
  }

  Rollout best = roll_out(z0, u_best, bases, model, discrete);
  auto plan_cost = [&](const Rollout& r, const std::vector<Vector7d>& u) {
    HorizonPlan tmp;
    tmp.controls = u;
    tmp.ee_poses = r.ee_poses;
    tmp.states = r.states;
    return evaluate_cost(tmp, targets, weights);
  };
  double j_best = plan_cost(best, u_best);

  int passes = 0;
  int total_iterations = 0;
  double last_kkt = 0.0;
  bool any_feasible_solve = false;
  QpSolver solver;

  for (int pass = 0; pass < options.max_passes; ++pass) {
    QpData qp = build_qp(z0, best, targets, bases, model, discrete, weights, h, options);
    QpResult res = solver.solve(qp.hessian, qp.gradient, qp.rows, qp.rhs);
    total_iterations += res.iterations;
    ++passes;

    if (options.accel_mode == AccelConstraintMode::ExactBall && res.ok()) {
      // Outer-approximate the Euclidean ball with supporting hyperplanes.
      for (int cut = 0; cut < options.max_ball_cuts && res.ok(); ++cut) {
        bool violated = false;
        std::vector<Eigen::VectorXd> new_rows;
        for (int k = 0; k < h; ++k) {
          const Vector7d u_k = res.x.segment<7>(7 * k);
          if (u_k.norm() > model.u_norm_max_rad_s2 * (1.0 + 1e-9)) {
            violated = true;
            Eigen::VectorXd r = Eigen::VectorXd::Zero(qp.rows.cols());
            r.segment<7>(7 * k) = -u_k.normalized();
            new_rows.push_back(r);
          }
        }
        if (!violated) break;
        const int old = static_cast<int>(qp.rows.rows());
        qp.rows.conservativeResize(old + static_cast<int>(new_rows.size()), Eigen::NoChange);
        qp.rhs.conservativeResize(old + static_cast<int>(new_rows.size()));
        for (std::size_t i = 0; i < new_rows.size(); ++i) {
          qp.rows.row(old + static_cast<int>(i)) = new_rows[i].transpose();
          qp.rhs(old + static_cast<int>(i)) = -model.u_norm_max_rad_s2;
        }
        res = solver.solve(qp.hessian, qp.gradient, qp.rows, qp.rhs);
        total_iterations += res.iterations;
      }
    }

    if (!res.ok()) break;
    any_feasible_solve = true;
    last_kkt = res.kkt_residual;

    // Accept-only-improvement line search between the previous point and
    // the QP optimum (all state constraints are linear in U, so blends
    // stay feasible).
    const std::vector<Vector7d> u_qp = unstack(res.x, h);
    bool accepted = false;
    double j_new = j_best;
    std::vector<Vector7d> u_new;
    for (double beta : {1.0, 0.5, 0.25}) {
      std::vector<Vector7d> u_try(static_cast<std::size_t>(h));
      for (int k = 0; k < h; ++k) {
        u_try[static_cast<std::size_t>(k)] =
            u_best[static_cast<std::size_t>(k)] +
            beta * (u_qp[static_cast<std::size_t>(k)] - u_best[static_cast<std::size_t>(k)]);
      }
      Rollout r = roll_out(z0, u_try, bases, model, discrete);
      const double j_try = plan_cost(r, u_try);
      if (j_try <= j_best + 1e-9) {
        accepted = true;
        j_new = j_try;
        u_new = std::move(u_try);
        best = std::move(r);
        break;
      }
    }
    if (!accepted) break;

    const double decrease = j_best - j_new;
    u_best = std::move(u_new);
    j_best = j_new;
    if (decrease < std::max(options.cost_decrease_tol, options.cost_decrease_tol * j_best)) {
      break;
    }
  }

  HorizonPlan plan;
  plan.controls = u_best;
  plan.states = best.states;
  plan.ee_poses = best.ee_poses;
  plan.cost = j_best;
  plan.solver_iterations = total_iterations;
  plan.relinearization_passes = passes;
  plan.kkt_residual = last_kkt;
  plan.feasible = any_feasible_solve && audit_plan(plan, model, 1e-6);
  plan.solve_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return plan;
}

Vector7d simple_following_step(const JointState& z0, const Pose6& target_now,
                               const Vector6d& target_velocity, const ArmModel& model,
                               const Pose6& base, const FollowGains& gains) {
  const Pose6 ee = forward_kinematics(model, z0.q, base);
  const auto jac = geometric_jacobian(model, z0.q, base);
  const Vector6d toward_target = -pose_error(ee, target_now);
  const Vector6d twist = jac * z0.q_dot;

  Vector6d accel;
  accel.head<3>() = gains.kp_pos * toward_target.head<3>() +
                    gains.kd_pos * (target_velocity.head<3>() - twist.head<3>());
  accel.tail<3>() = gains.kp_ori * toward_target.tail<3>() +
                    gains.kd_ori * (target_velocity.tail<3>() - twist.tail<3>());

  // Damped least squares: J'(J J' + lambda^2 I)^-1 a.
  const double lambda2 = gains.dls_lambda * gains.dls_lambda;
  const Matrix6d jjt = jac * jac.transpose() + lambda2 * Matrix6d::Identity();
  Vector7d u = jac.transpose() * jjt.ldlt().solve(accel);

  const double norm = u.norm();
  if (norm > model.u_norm_max_rad_s2) u *= model.u_norm_max_rad_s2 / norm;
  return u;
}

HorizonPlan shift_plan(const HorizonPlan& plan, int new_horizon) {
  HorizonPlan out;
  out.controls.reserve(static_cast<std::size_t>(new_horizon));
  for (int k = 0; k < new_horizon; ++k) {
    const std::size_t src = std::min<std::size_t>(static_cast<std::size_t>(k) + 1,
                                                  plan.controls.empty()
                                                      ? 0
                                                      : plan.controls.size() - 1);
    out.controls.push_back(plan.controls.empty() ? Vector7d::Zero() : plan.controls[src]);
  }
  return out;
}

FixedHorizonResult fixed_horizon_step(const JointState& z0,
                                      const std::vector<Pose6>& target_trajectory,
                                      const std::vector<Pose6>& base_trajectory,
                                      const ArmModel& model, const DiscreteModel& discrete,
                                      const CostWeights& weights, int horizon_steps,
                                      const std::optional<HorizonPlan>& previous,
                                      const SolverOptions& options) {
  std::optional<HorizonPlan> warm;
  if (previous) warm = shift_plan(*previous, horizon_steps);
  FixedHorizonResult out{Vector7d::Zero(),
                         solve_horizon(z0, target_trajectory, base_trajectory, model, discrete,
                                       weights, horizon_steps, warm, options)};
  out.u0 = out.plan.controls.front();
  return out;
}

RhcState RhcState::fresh(int horizon_steps) {
  RhcState s;
  s.initial_horizon = horizon_steps;
  s.remaining_steps = horizon_steps;
  return s;
}

void RhcState::reset() {
  remaining_steps = initial_horizon;
  warm.reset();
}

ShrinkingHorizonResult shrinking_horizon_step(const RhcState& rhc, const JointState& z0,
                                              const std::vector<Pose6>& target_trajectory,
                                              const std::vector<Pose6>& base_trajectory,
                                              const ArmModel& model,
                                              const DiscreteModel& discrete,
                                              const CostWeights& weights,
                                              const SolverOptions& options) {
  if (rhc.remaining_steps < 1) throw ConfigError("shrinking_horizon_step: horizon exhausted");
  const int h = rhc.remaining_steps;
  std::optional<HorizonPlan> warm;
  if (rhc.warm) warm = shift_plan(*rhc.warm, h);

  ShrinkingHorizonResult out;
  out.plan = solve_horizon(z0, target_trajectory, base_trajectory, model, discrete, weights, h,
                           warm, options);
  out.u0 = out.plan.controls.front();
  out.next = rhc;
  if (h == 1) {
    // Window exhausted: re-optimize against a fresh 0.5 s window next call.
    out.next.remaining_steps = rhc.initial_horizon;
    out.next.warm.reset();
  } else {
    out.next.remaining_steps = h - 1;
    out.next.warm = out.plan;
  }
  return out;
}

CostWeights adapt_weights_to_sea(const CostWeights& weights, double roll_amplitude_rad,
                                 double kappa) {
  const double five_deg = 5.0 * M_PI / 180.0;
  const double scale = 1.0 + kappa * roll_amplitude_rad / five_deg;
  CostWeights out = weights;
  out.q_stage *= scale;
  out.q_terminal *= scale;
  return out;
}

}  // namespace wavecatch

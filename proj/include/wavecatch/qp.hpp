#pragma once

#include <Eigen/Dense>

namespace wavecatch {

/// Strictly convex quadratic program
///   min 1/2 x' G x + g0' x   s.t.  A x >= b
/// solved with the Goldfarb-Idnani dual active-set method. Deterministic:
/// the most violated constraint enters first, ties broken on the lowest
/// index. Sized for the dense problems this library produces
/// (n <= ~200, a few thousand rows).
struct QpResult {
  enum class Status { Optimal, Infeasible, IterationLimit };

  Status status = Status::Optimal;
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per row of A, zero for inactive rows
  double objective = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;    // filled by kkt_residual() at solve end

  bool ok() const { return status == Status::Optimal; }
};

class QpSolver {
 public:
  struct Options {
    double feasibility_tol = 1e-9;
    int max_iterations = 0;  // 0 -> 10 * (n + m)
  };

  QpSolver() : options_() {}
  explicit QpSolver(const Options& options) : options_(options) {}

  /// G must be symmetric positive definite.
  QpResult solve(const Eigen::MatrixXd& g_mat, const Eigen::VectorXd& g0,
                 const Eigen::MatrixXd& a_mat, const Eigen::VectorXd& b) const;

 private:
  Options options_;
};

/// Max of the stationarity, primal-feasibility, dual-sign and
/// complementarity residuals for A x >= b with multipliers lambda >= 0:
///   stationarity  ||G x + g0 - A' lambda||_inf
///   primal        max(0, max_i (b - A x)_i)
///   dual          max(0, -min_i lambda_i)
///   complement    max_i |lambda_i (A x - b)_i|
double kkt_residual(const Eigen::MatrixXd& g_mat, const Eigen::VectorXd& g0,
                    const Eigen::MatrixXd& a_mat, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

}  // namespace wavecatch

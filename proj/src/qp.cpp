#include "wavecatch/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "wavecatch/errors.hpp"

namespace wavecatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Givens pair zeroing the second component: (a, b) -> (r, 0).
struct Givens {
  double c, s;
  static Givens make(double a, double b) {
    if (b == 0.0) return {1.0, 0.0};
    const double r = std::hypot(a, b);
    return {a / r, b / r};
  }
};

}  // namespace

QpResult QpSolver::solve(const Eigen::MatrixXd& g_mat, const Eigen::VectorXd& g0,
                         const Eigen::MatrixXd& a_mat, const Eigen::VectorXd& b) const {
  const int n = static_cast<int>(g_mat.rows());
  const int m = static_cast<int>(a_mat.rows());
  if (g_mat.cols() != n || g0.size() != n || (m > 0 && a_mat.cols() != n) || b.size() != m) {
    throw ShapeError("QpSolver: inconsistent problem dimensions");
  }

  QpResult result;
  result.multipliers = Eigen::VectorXd::Zero(m);

  Eigen::LLT<Eigen::MatrixXd> llt(g_mat);
  if (llt.info() != Eigen::Success) {
    throw NumericError("QpSolver: Hessian is not positive definite");
  }

  // J = L^-T so that J J' = G^-1; x starts at the unconstrained minimum.
  Eigen::MatrixXd j_mat =
      llt.matrixL().transpose().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd x = -llt.solve(g0);

  Eigen::MatrixXd r_mat = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> active;      // constraint indices, |active| = q
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);  // multipliers of active set
  int q = 0;

  const int max_iter = options_.max_iterations > 0 ? options_.max_iterations : 10 * (n + m + 1);
  const double feas_tol = options_.feasibility_tol;

  auto finish = [&](QpResult::Status status) {
    result.status = status;
    result.x = x;
    for (int k = 0; k < q; ++k) result.multipliers(active[k]) = u(k);
    result.objective = 0.5 * x.dot(g_mat * x) + g0.dot(x);
    result.kkt_residual = kkt_residual(g_mat, g0, a_mat, b, x, result.multipliers);
    return result;
  };

  // Drops active constraint l: shifts R columns left, re-triangularizes,
  // mirrors the rotations onto J to keep J' N = [R; 0].
  auto drop_constraint = [&](int l) {
    active.erase(active.begin() + l);
    for (int k = l; k < q - 1; ++k) u(k) = u(k + 1);
    u(q - 1) = 0.0;
    for (int col = l; col < q - 1; ++col) {
      r_mat.col(col).head(q) = r_mat.col(col + 1).head(q);
    }
    r_mat.col(q - 1).setZero();
    --q;
    for (int k = l; k < q; ++k) {
      const Givens giv = Givens::make(r_mat(k, k), r_mat(k + 1, k));
      for (int col = k; col < q; ++col) {
        const double a = r_mat(k, col), c = r_mat(k + 1, col);
        r_mat(k, col) = giv.c * a + giv.s * c;
        r_mat(k + 1, col) = -giv.s * a + giv.c * c;
      }
      for (int row = 0; row < n; ++row) {
        const double a = j_mat(row, k), c = j_mat(row, k + 1);
        j_mat(row, k) = giv.c * a + giv.s * c;
        j_mat(row, k + 1) = -giv.s * a + giv.c * c;
      }
    }
  };

  int iter = 0;
  while (true) {
    // Step 1: pick the most violated inactive constraint.
    int ip = -1;
    double worst = -feas_tol;
    for (int i = 0; i < m; ++i) {
      bool is_active = false;
      for (int k = 0; k < q; ++k) {
        if (active[k] == i) {
          is_active = true;
          break;
        }
      }
      if (is_active) continue;
      const double s = a_mat.row(i).dot(x) - b(i);
      if (s < worst) {
        worst = s;
        ip = i;
      }
    }
    if (ip < 0) return finish(QpResult::Status::Optimal);

    const Eigen::VectorXd np = a_mat.row(ip).transpose();
    double u_plus = 0.0;
    double s_ip = np.dot(x) - b(ip);

    while (true) {
      if (++iter > max_iter) return finish(QpResult::Status::IterationLimit);

      // Step directions in primal and dual space.
      const Eigen::VectorXd d = j_mat.transpose() * np;
      Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
      if (q < n) z = j_mat.rightCols(n - q) * d.tail(n - q);
      Eigen::VectorXd r_dir = Eigen::VectorXd::Zero(q);
      if (q > 0) {
        r_dir = r_mat.topLeftCorner(q, q)
                    .triangularView<Eigen::Upper>()
                    .solve(d.head(q));
      }

      double t1 = kInf;
      int l = -1;
      for (int k = 0; k < q; ++k) {
        if (r_dir(k) > 1e-14) {
          const double ratio = u(k) / r_dir(k);
          if (ratio < t1) {
            t1 = ratio;
            l = k;
          }
        }
      }
      const double znp = z.dot(np);
      const bool z_nonzero = z.lpNorm<Eigen::Infinity>() > 1e-13 && znp > 1e-13;
      const double t2 = z_nonzero ? -s_ip / znp : kInf;
      const double t = std::min(t1, t2);

      if (t >= kInf) return finish(QpResult::Status::Infeasible);

      if (!z_nonzero) {
        // Dual step only.
        u.head(q) -= t * r_dir;
        u_plus += t;
        drop_constraint(l);
        continue;
      }

      x += t * z;
      u.head(q) -= t * r_dir;
      u_plus += t;
      s_ip = np.dot(x) - b(ip);

      if (t == t2) {
        // Full step: admit constraint ip into the active set.
        Eigen::VectorXd d_new = j_mat.transpose() * np;
        for (int k = n - 1; k > q; --k) {
          const Givens giv = Givens::make(d_new(k - 1), d_new(k));
          d_new(k - 1) = giv.c * d_new(k - 1) + giv.s * d_new(k);
          d_new(k) = 0.0;
          for (int row = 0; row < n; ++row) {
            const double a = j_mat(row, k - 1), c = j_mat(row, k);
            j_mat(row, k - 1) = giv.c * a + giv.s * c;
            j_mat(row, k) = -giv.s * a + giv.c * c;
          }
        }
        r_mat.col(q).head(q + 1) = d_new.head(q + 1);
        active.push_back(ip);
        u(q) = u_plus;
        ++q;
        break;  // back to step 1
      }

      // Partial step: deactivate the blocking constraint and retry.
      drop_constraint(l);
    }
  }
}

double kkt_residual(const Eigen::MatrixXd& g_mat, const Eigen::VectorXd& g0,
                    const Eigen::MatrixXd& a_mat, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  const Eigen::VectorXd stat = g_mat * x + g0 - a_mat.transpose() * lambda;
  double res = stat.lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd slack = a_mat * x - b;
  for (int i = 0; i < slack.size(); ++i) {
    res = std::max(res, -slack(i));                      // primal feasibility
    res = std::max(res, -lambda(i));                     // dual sign
    res = std::max(res, std::abs(lambda(i) * slack(i))); // complementarity
  }
  return res;
}

}  // namespace wavecatch

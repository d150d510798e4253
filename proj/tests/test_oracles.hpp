#pragma once

// Independent oracles used by the unit and acceptance suites. These stay
// deliberately naive (grid refinement, exhaustive enumeration, direct
// algebra) and share no code with the library paths they check.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace testoracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Brute-force scalar minimizer on [lo, hi]: coarse grid followed by three
/// refinement passes, final resolution below 1e-7.
inline double grid_minimize(const std::function<double(double)>& f, double lo,
                            double hi) {
  double best_x = lo;
  for (int pass = 0; pass < 4; ++pass) {
    const int cells = 4000;
    const double step = (hi - lo) / cells;
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= cells; ++i) {
      const double x = lo + i * step;
      const double v = f(x);
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    lo = best_x - step;
    hi = best_x + step;
  }
  return best_x;
}

struct ToyActiveSetSolution {
  VectorXd x1, x2, x3, mu;
  bool found = false;
};

/// Exhaustive active-set enumeration for the toy QP shape
///   min x2'P x2 + a'x2 + x3'Q x3 + b'x3
///   s.t. x1 - A x2 - x3 = rhs, x1 >= 0.
/// Every subset S of active coordinates (x1_i = 0) gives one square linear
/// system; the feasible one with nonnegative multipliers is the optimum.
/// Exponential in n1 -- miniature instances only.
inline ToyActiveSetSolution toy_active_set(const MatrixXd& a,
                                           const VectorXd& pdiag,
                                           const VectorXd& lin_a,
                                           const VectorXd& qdiag,
                                           const VectorXd& lin_b,
                                           const VectorXd& rhs,
                                           double tol = 1e-9) {
  const int n1 = static_cast<int>(rhs.size());
  const int n2 = static_cast<int>(pdiag.size());
  const int n3 = static_cast<int>(qdiag.size());
  if (n1 > 20) throw std::invalid_argument("active-set oracle: n1 too large");

  ToyActiveSetSolution best;
  for (unsigned mask = 0; mask < (1u << n1); ++mask) {
    // Unknowns (x2, x3). mu = 2 Q x3 + b; inactive coords force mu_i = 0,
    // active coords force (A x2 + x3 + rhs)_i = 0.
    const int dim = n2 + n3;
    MatrixXd sys = MatrixXd::Zero(dim, dim);
    VectorXd rhs_sys = VectorXd::Zero(dim);
    // Stationarity in x2: 2 P x2 - A' mu + a = 0 with mu = 2 Q x3 + b.
    for (int i = 0; i < n2; ++i) sys(i, i) = 2.0 * pdiag(i);
    sys.block(0, n2, n2, n3) = -a.transpose() * (2.0 * qdiag).asDiagonal();
    rhs_sys.head(n2) = a.transpose() * lin_b - lin_a;
    // Row per slack coordinate.
    for (int i = 0; i < n1; ++i) {
      const int row = n2 + i;
      if (mask & (1u << i)) {
        sys.block(row, 0, 1, n2) = a.row(i);
        sys(row, n2 + i) = 1.0;
        rhs_sys(row) = -rhs(i);
      } else {
        sys(row, n2 + i) = 2.0 * qdiag(i);
        rhs_sys(row) = -lin_b(i);
      }
    }
    const VectorXd sol = sys.fullPivLu().solve(rhs_sys);
    if ((sys * sol - rhs_sys).norm() > tol) continue;
    const VectorXd x2 = sol.head(n2);
    const VectorXd x3 = sol.tail(n3);
    const VectorXd mu = 2.0 * qdiag.cwiseProduct(x3) + lin_b;
    VectorXd x1 = a * x2 + x3 + rhs;
    bool ok = true;
    for (int i = 0; i < n1; ++i) {
      if (mask & (1u << i)) {
        if (mu(i) < -tol) ok = false;
        x1(i) = 0.0;
      } else {
        if (x1(i) < -tol || std::abs(mu(i)) > tol) ok = false;
      }
    }
    if (ok) {
      best.x1 = x1;
      best.x2 = x2;
      best.x3 = x3;
      best.mu = mu;
      best.found = true;
      return best;
    }
  }
  return best;
}

}  // namespace testoracle

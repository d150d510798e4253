#pragma once

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace admmcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Marker value for a gradient that is not Lipschitz continuous.
inline constexpr double kUnboundedLipschitz =
    std::numeric_limits<double>::infinity();

/// Raised by block oracles: no exact closed form for the requested
/// subproblem, or an evaluation point outside the block's domain.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One block objective f_i. Implementations must return *exact* minimizers
/// (up to floating-point rounding of their closed form) so that the solver
/// steps and certificate checks inherit no extra error. The shipped
/// implementations live in problems.hpp; user-defined oracles must
/// self-certify the same exactness.
class BlockObjective {
 public:
  virtual ~BlockObjective() = default;

  /// argmin_x f(x) + (rho/2) ||A x - target||^2
  ///   [ + (1/2) (x - anchor)' W (x - anchor) ]   when a prox term is given.
  virtual Vector solve(const Matrix& coupling, double rho,
                       const Vector& target, const Matrix* prox_weight,
                       const Vector* anchor) const = 0;

  /// An element of the subdifferential at x. For nonsmooth objectives,
  /// the element of minimal distance to `hint`; for smooth ones, the
  /// gradient (hint ignored).
  virtual Vector subgradient(const Vector& x, const Vector& hint) const = 0;

  virtual int dimension() const = 0;
  virtual std::string kind() const = 0;
};

/// One block of the separable problem: coupling matrix A_i, objective
/// oracle, and the regularity constants used by the certificates.
struct BlockSpec {
  Matrix coupling;  // p x n_i
  std::shared_ptr<const BlockObjective> oracle;
  double sigma = 0.0;  // strong-convexity modulus, 0 when merely convex
  double lipschitz = kUnboundedLipschitz;  // gradient Lipschitz constant
  bool constrained = false;  // set constraint folded into the oracle

  int rows() const { return static_cast<int>(coupling.rows()); }
  int cols() const { return static_cast<int>(coupling.cols()); }
};

/// minimize sum_i f_i(x_i)  subject to  sum_i A_i x_i = b.
/// Immutable after construction; safe to share read-only across threads.
class ProblemInstance {
 public:
  ProblemInstance(std::vector<BlockSpec> blocks, Vector rhs);

  int block_count() const { return static_cast<int>(blocks_.size()); }
  int rows() const { return static_cast<int>(rhs_.size()); }
  int total_cols() const { return total_cols_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  const BlockSpec& block(int i) const { return blocks_.at(i); }
  const Vector& rhs() const { return rhs_; }

  /// [A_1, ..., A_N], p x (n_1 + ... + n_N).
  Matrix stacked_coupling() const;

 private:
  std::vector<BlockSpec> blocks_;
  Vector rhs_;
  int total_cols_ = 0;
};

/// Primal blocks x_1..x_N and multiplier lambda at iteration k.
struct IterateState {
  std::vector<Vector> primal;
  Vector dual;
  int iteration = 0;
};

/// A candidate optimal pair (x*, lambda*). kkt_residual is the achieved
/// violation of the first-order conditions; +inf when no dual certificate
/// is available (primal-only comparison point).
struct ReferenceSolution {
  std::vector<Vector> primal_star;
  Vector dual_star;
  double kkt_residual = std::numeric_limits<double>::infinity();

  bool has_dual() const { return dual_star.size() > 0; }
  bool certified(double tol) const {
    return has_dual() && kkt_residual <= tol;
  }
};

struct KktReport {
  bool satisfied = false;
  double feasibility = 0.0;                // || sum A_i x_i* - b ||
  std::vector<double> stationarity;        // dist(A_i' l*, df_i(x_i*)) per block
  double max_violation = 0.0;
};

/// Exact block subproblem solve; see BlockObjective::solve. `prox_weight`
/// and `anchor` must be both present or both absent. A prox weight that is
/// exactly zero is treated as absent.
Vector solve_block_subproblem(const BlockSpec& block, double rho,
                              const Vector& target,
                              const Matrix* prox_weight = nullptr,
                              const Vector* anchor = nullptr);

/// Subgradient of the block objective at x, nearest to `hint` when the
/// subdifferential is not a singleton.
Vector subgradient_at(const BlockSpec& block, const Vector& x,
                      const Vector& hint);

/// || sum_i A_i x_i - b ||.
double primal_residual(const ProblemInstance& instance,
                       const IterateState& state);

/// First-order optimality check: feasibility plus per-block stationarity
/// dist(A_i' lambda*, df_i(x_i*)), each measured against `tol`.
KktReport kkt_check(const ProblemInstance& instance,
                    const ReferenceSolution& candidate, double tol);

}  // namespace admmcert

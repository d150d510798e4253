#include "admmcert/core.hpp"

#include <cmath>
#include <utility>

namespace admmcert {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

ProblemInstance::ProblemInstance(std::vector<BlockSpec> blocks, Vector rhs)
    : blocks_(std::move(blocks)), rhs_(std::move(rhs)) {
  require(!blocks_.empty(), "instance needs at least one block");
  require(rhs_.size() > 0, "rhs must be nonempty");
  const int p = static_cast<int>(rhs_.size());
  for (const BlockSpec& b : blocks_) {
    require(b.oracle != nullptr, "block oracle missing");
    require(b.rows() == p, "all couplings must have rhs dimension rows");
    require(b.cols() == b.oracle->dimension(),
            "coupling columns must match oracle dimension");
    require(b.sigma >= 0.0, "sigma must be nonnegative");
    require(b.lipschitz > 0.0, "lipschitz must be positive (or unbounded)");
    if (b.constrained) {
      // An indicator term destroys gradient Lipschitzness on the boundary.
      require(std::isinf(b.lipschitz),
              "constrained blocks must have unbounded lipschitz");
    }
    total_cols_ += b.cols();
  }
}

Matrix ProblemInstance::stacked_coupling() const {
  Matrix m(rows(), total_cols_);
  int col = 0;
  for (const BlockSpec& b : blocks_) {
    m.middleCols(col, b.cols()) = b.coupling;
    col += b.cols();
  }
  return m;
}

namespace {

bool is_zero_matrix(const Matrix& m) {
  return (m.array() == 0.0).all();
}

}  // namespace

Vector solve_block_subproblem(const BlockSpec& block, double rho,
                              const Vector& target, const Matrix* prox_weight,
                              const Vector* anchor) {
  require(rho > 0.0, "rho must be positive");
  require(target.size() == block.rows(), "target dimension mismatch");
  require((prox_weight == nullptr) == (anchor == nullptr),
          "prox_weight and anchor must be both present or both absent");
  if (prox_weight != nullptr) {
    require(prox_weight->rows() == block.cols() &&
                prox_weight->cols() == block.cols(),
            "prox_weight dimension mismatch");
    require(anchor->size() == block.cols(), "anchor dimension mismatch");
    if (is_zero_matrix(*prox_weight)) {
      prox_weight = nullptr;
      anchor = nullptr;
    }
  }
  return block.oracle->solve(block.coupling, rho, target, prox_weight, anchor);
}

Vector subgradient_at(const BlockSpec& block, const Vector& x,
                      const Vector& hint) {
  require(x.size() == block.cols(), "x dimension mismatch");
  require(hint.size() == block.cols(), "hint dimension mismatch");
  return block.oracle->subgradient(x, hint);
}

double primal_residual(const ProblemInstance& instance,
                       const IterateState& state) {
  const int n = instance.block_count();
  require(static_cast<int>(state.primal.size()) == n,
          "state block count mismatch");
  Vector acc = -instance.rhs();
  for (int i = 0; i < n; ++i) {
    require(state.primal[i].size() == instance.block(i).cols(),
            "state block dimension mismatch");
    acc += instance.block(i).coupling * state.primal[i];
  }
  return acc.norm();
}

KktReport kkt_check(const ProblemInstance& instance,
                    const ReferenceSolution& candidate, double tol) {
  const int n = instance.block_count();
  require(static_cast<int>(candidate.primal_star.size()) == n,
          "candidate block count mismatch");
  require(candidate.dual_star.size() == instance.rows(),
          "candidate dual dimension mismatch");
  require(tol > 0.0, "tol must be positive");

  KktReport report;
  Vector acc = -instance.rhs();
  for (int i = 0; i < n; ++i) {
    acc += instance.block(i).coupling * candidate.primal_star[i];
  }
  report.feasibility = acc.norm();
  report.max_violation = report.feasibility;

  report.stationarity.reserve(n);
  for (int i = 0; i < n; ++i) {
    const BlockSpec& b = instance.block(i);
    const Vector hint = b.coupling.transpose() * candidate.dual_star;
    const Vector g = subgradient_at(b, candidate.primal_star[i], hint);
    const double dist = (hint - g).norm();
    report.stationarity.push_back(dist);
    report.max_violation = std::max(report.max_violation, dist);
  }
  report.satisfied = report.max_violation <= tol;
  return report;
}

}  // namespace admmcert

#include "admmcert/oracles.hpp"

#include <cmath>
#include <utility>

namespace admmcert {

namespace {

// Strictly zero off-diagonal entries are required: anything else would make
// the coordinatewise clamp an inexact minimizer.
bool exactly_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

Vector L1Block::solve(const Matrix& coupling, double rho, const Vector& target,
                      const Matrix* prox_weight, const Vector* anchor) const {
  // |x| + (q/2) x^2 - c x  with  q = rho||a||^2 + w,  c = rho a't + w u.
  const double a2 = coupling.squaredNorm();
  double q = rho * a2;
  double c = rho * coupling.col(0).dot(target);
  if (prox_weight != nullptr) {
    const double w = (*prox_weight)(0, 0);
    if (w < 0.0) throw OracleError("l1 block: negative prox weight");
    q += w;
    c += w * (*anchor)(0);
  }
  Vector x(1);
  if (q == 0.0) {
    x(0) = 0.0;  // objective reduces to |x| + const
    return x;
  }
  if (c > 1.0) {
    x(0) = (c - 1.0) / q;
  } else if (c < -1.0) {
    x(0) = (c + 1.0) / q;
  } else {
    x(0) = 0.0;
  }
  return x;
}

Vector L1Block::subgradient(const Vector& x, const Vector& hint) const {
  Vector g(1);
  if (x(0) > 0.0) {
    g(0) = 1.0;
  } else if (x(0) < 0.0) {
    g(0) = -1.0;
  } else {
    g(0) = std::clamp(hint(0), -1.0, 1.0);
  }
  return g;
}

DiagQuadBlock::DiagQuadBlock(Vector pdiag, Vector lin)
    : pdiag_(std::move(pdiag)), lin_(std::move(lin)) {
  if (pdiag_.size() != lin_.size()) {
    throw std::invalid_argument("quadratic block: pdiag/lin size mismatch");
  }
  if ((pdiag_.array() < 0.0).any()) {
    throw std::invalid_argument("quadratic block: pdiag must be nonnegative");
  }
}

Vector DiagQuadBlock::solve(const Matrix& coupling, double rho,
                            const Vector& target, const Matrix* prox_weight,
                            const Vector* anchor) const {
  Matrix m = rho * (coupling.transpose() * coupling);
  m.diagonal() += 2.0 * pdiag_;
  Vector rhs = rho * (coupling.transpose() * target) - lin_;
  if (prox_weight != nullptr) {
    m += *prox_weight;
    rhs += (*prox_weight) * (*anchor);
  }
  Eigen::LDLT<Matrix> ldlt(m);
  Vector x = ldlt.solve(rhs);
  const double scale = m.norm() * x.norm() + rhs.norm();
  if (ldlt.info() != Eigen::Success ||
      (m * x - rhs).norm() > 1e-10 * std::max(scale, 1.0)) {
    // Singular normal equations (sigma = 0 with rank-deficient coupling):
    // fall back to the deterministic minimum-norm minimizer.
    x = m.completeOrthogonalDecomposition().solve(rhs);
  }
  return x;
}

Vector DiagQuadBlock::subgradient(const Vector& x, const Vector& hint) const {
  (void)hint;
  if (x.size() != pdiag_.size()) {
    throw std::invalid_argument("quadratic block: x dimension mismatch");
  }
  return 2.0 * pdiag_.cwiseProduct(x) + lin_;
}

Vector NonnegBlock::solve(const Matrix& coupling, double rho,
                          const Vector& target, const Matrix* prox_weight,
                          const Vector* anchor) const {
  const Matrix gram = coupling.transpose() * coupling;
  if (!exactly_diagonal(gram)) {
    throw OracleError(
        "nonneg block: no closed form (A'A not diagonal)");
  }
  if (prox_weight != nullptr && !exactly_diagonal(*prox_weight)) {
    throw OracleError(
        "nonneg block: no closed form (prox weight not diagonal)");
  }
  const Vector atb = coupling.transpose() * target;
  Vector x(dim_);
  for (int i = 0; i < dim_; ++i) {
    const double d = gram(i, i);
    double num;
    double den;
    if (prox_weight == nullptr) {
      num = atb(i);  // rho cancels
      den = d;
    } else {
      const double w = (*prox_weight)(i, i);
      num = rho * atb(i) + w * (*anchor)(i);
      den = rho * d + w;
    }
    if (den == 0.0) {
      x(i) = 0.0;  // objective is constant in this coordinate
    } else {
      x(i) = std::max(0.0, num / den);
    }
  }
  return x;
}

Vector NonnegBlock::subgradient(const Vector& x, const Vector& hint) const {
  Vector g(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x(i) < 0.0) {
      throw OracleError("nonneg block: point outside the domain");
    }
    // Normal cone of the orthant: g <= 0 on active coordinates, 0 elsewhere.
    g(i) = x(i) == 0.0 ? std::min(hint(i), 0.0) : 0.0;
  }
  return g;
}

std::shared_ptr<const BlockObjective> make_l1_block() {
  return std::make_shared<L1Block>();
}

std::shared_ptr<const BlockObjective> make_quadratic_block(Vector pdiag,
                                                           Vector lin) {
  return std::make_shared<DiagQuadBlock>(std::move(pdiag), std::move(lin));
}

std::shared_ptr<const BlockObjective> make_nonneg_block(int dim) {
  return std::make_shared<NonnegBlock>(dim);
}

}  // namespace admmcert

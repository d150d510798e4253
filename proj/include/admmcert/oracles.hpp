#pragma once

#include <memory>

#include "admmcert/core.hpp"

namespace admmcert {

/// f(x) = |x| on R. The subproblem minimizer is a soft threshold; the
/// subgradient at 0 is the clamp of the hint to [-1, 1].
class L1Block final : public BlockObjective {
 public:
  Vector solve(const Matrix& coupling, double rho, const Vector& target,
               const Matrix* prox_weight, const Vector* anchor) const override;
  Vector subgradient(const Vector& x, const Vector& hint) const override;
  int dimension() const override { return 1; }
  std::string kind() const override { return "l1"; }
};

/// f(x) = x' P x + a' x with P diagonal, diag(P) >= 0. The subproblem
/// reduces to the normal equations (2P + rho A'A + W) x = rho A't + W u - a.
class DiagQuadBlock final : public BlockObjective {
 public:
  DiagQuadBlock(Vector pdiag, Vector lin);
  Vector solve(const Matrix& coupling, double rho, const Vector& target,
               const Matrix* prox_weight, const Vector* anchor) const override;
  Vector subgradient(const Vector& x, const Vector& hint) const override;
  int dimension() const override { return static_cast<int>(pdiag_.size()); }
  std::string kind() const override { return "quad_diag"; }

  const Vector& pdiag() const { return pdiag_; }
  const Vector& lin() const { return lin_; }

 private:
  Vector pdiag_;
  Vector lin_;
};

/// f = indicator of the nonnegative orthant. Closed form only when A'A and
/// the prox weight are diagonal (coordinates separate); otherwise the solve
/// reports no closed form.
class NonnegBlock final : public BlockObjective {
 public:
  explicit NonnegBlock(int dim) : dim_(dim) {}
  Vector solve(const Matrix& coupling, double rho, const Vector& target,
               const Matrix* prox_weight, const Vector* anchor) const override;
  Vector subgradient(const Vector& x, const Vector& hint) const override;
  int dimension() const override { return dim_; }
  std::string kind() const override { return "nonneg"; }

 private:
  int dim_;
};

std::shared_ptr<const BlockObjective> make_l1_block();
std::shared_ptr<const BlockObjective> make_quadratic_block(Vector pdiag,
                                                           Vector lin);
std::shared_ptr<const BlockObjective> make_nonneg_block(int dim);

}  // namespace admmcert

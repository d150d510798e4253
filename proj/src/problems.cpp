#include "admmcert/problems.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "admmcert/detail/rng.hpp"

namespace admmcert {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

Matrix gaussian_matrix(detail::Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.gaussian();
  }
  return m;
}

Vector gaussian_vector(detail::Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.gaussian();
  return v;
}

Vector positive_uniform_vector(detail::Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    while (u == 0.0) u = rng.uniform01();
    v(i) = u;
  }
  return v;
}

const DiagQuadBlock* as_quadratic(const BlockSpec& block) {
  return dynamic_cast<const DiagQuadBlock*>(block.oracle.get());
}

}  // namespace

BasisPursuitInstance generate_basis_pursuit(const BasisPursuitSpec& spec) {
  require(spec.rows > 0 && spec.cols > 0, "dimensions must be positive");
  require(spec.sparsity >= 0 && spec.sparsity <= spec.cols,
          "sparsity must be within the column count");
  require(spec.noise_sigma >= 0.0, "noise_sigma must be nonnegative");

  detail::Rng rng_a = detail::stream(spec.seed, 1);
  detail::Rng rng_support = detail::stream(spec.seed, 2);
  detail::Rng rng_values = detail::stream(spec.seed, 3);
  detail::Rng rng_noise = detail::stream(spec.seed, 4);

  const Matrix a = gaussian_matrix(rng_a, spec.rows, spec.cols);

  // Uniform s-subset via partial Fisher-Yates.
  std::vector<int> order(spec.cols);
  std::iota(order.begin(), order.end(), 0);
  for (int k = 0; k < spec.sparsity; ++k) {
    const int j =
        k + static_cast<int>(rng_support.below(spec.cols - k));
    std::swap(order[k], order[j]);
  }

  Vector x_star = Vector::Zero(spec.cols);
  for (int k = 0; k < spec.sparsity; ++k) {
    x_star(order[k]) = rng_values.gaussian();
  }

  Vector noise = spec.noise_sigma * gaussian_vector(rng_noise, spec.rows);
  Vector b = a * x_star + noise;

  const auto l1 = make_l1_block();
  std::vector<BlockSpec> blocks;
  blocks.reserve(spec.cols);
  for (int j = 0; j < spec.cols; ++j) {
    BlockSpec block;
    block.coupling = a.col(j);
    block.oracle = l1;
    block.sigma = 0.0;
    block.lipschitz = kUnboundedLipschitz;
    block.constrained = false;
    blocks.push_back(std::move(block));
  }

  const double gamma = 10.0 / b.lpNorm<1>();
  return BasisPursuitInstance{ProblemInstance(std::move(blocks), std::move(b)),
                              std::move(x_star), std::move(noise), gamma};
}

ProblemInstance generate_toy_qp(const ToyQpSpec& spec) {
  require(spec.n1 > 0 && spec.n2 > 0 && spec.n3 > 0,
          "dimensions must be positive");
  require(spec.n1 == spec.n3,
          "coupling shape x1 - A x2 - x3 = 0 forces n1 == n3");

  detail::Rng rng_p = detail::stream(spec.seed, 1);
  detail::Rng rng_q = detail::stream(spec.seed, 2);
  detail::Rng rng_a = detail::stream(spec.seed, 3);
  detail::Rng rng_lin_a = detail::stream(spec.seed, 4);
  detail::Rng rng_lin_b = detail::stream(spec.seed, 5);

  const Vector pdiag = positive_uniform_vector(rng_p, spec.n2);
  const Vector qdiag = positive_uniform_vector(rng_q, spec.n3);
  const Matrix a = gaussian_matrix(rng_a, spec.n1, spec.n2);
  const Vector lin_a = gaussian_vector(rng_lin_a, spec.n2);
  const Vector lin_b = gaussian_vector(rng_lin_b, spec.n3);

  std::vector<BlockSpec> blocks(3);

  blocks[0].coupling = Matrix::Identity(spec.n1, spec.n1);
  blocks[0].oracle = make_nonneg_block(spec.n1);
  blocks[0].sigma = 0.0;
  blocks[0].lipschitz = kUnboundedLipschitz;
  blocks[0].constrained = true;

  blocks[1].coupling = -a;
  blocks[1].oracle = make_quadratic_block(pdiag, lin_a);
  blocks[1].sigma = 2.0 * pdiag.minCoeff();
  blocks[1].lipschitz = 2.0 * pdiag.maxCoeff();
  blocks[1].constrained = false;

  blocks[2].coupling = -Matrix::Identity(spec.n3, spec.n3);
  blocks[2].oracle = make_quadratic_block(qdiag, lin_b);
  blocks[2].sigma = 2.0 * qdiag.minCoeff();
  blocks[2].lipschitz = 2.0 * qdiag.maxCoeff();
  blocks[2].constrained = false;

  return ProblemInstance(std::move(blocks), Vector::Zero(spec.n1));
}

ProblemInstance generate_random_qp(const RandomQpSpec& spec) {
  require(spec.rows > 0, "rows must be positive");
  require(!spec.dims.empty(), "dims must be nonempty");
  require(spec.diag_min > 0.0 && spec.diag_min <= spec.diag_max,
          "diagonal range must be positive");

  detail::Rng rng_rhs = detail::stream(spec.seed, 1);
  Vector rhs = gaussian_vector(rng_rhs, spec.rows);

  std::vector<BlockSpec> blocks;
  blocks.reserve(spec.dims.size());
  for (std::size_t i = 0; i < spec.dims.size(); ++i) {
    const int n = spec.dims[i];
    require(n > 0, "block dimensions must be positive");
    detail::Rng rng_diag = detail::stream(spec.seed, 10 + 3 * i);
    detail::Rng rng_lin = detail::stream(spec.seed, 11 + 3 * i);
    detail::Rng rng_coupling = detail::stream(spec.seed, 12 + 3 * i);

    Vector pdiag(n);
    for (int k = 0; k < n; ++k) {
      pdiag(k) =
          spec.diag_min + rng_diag.uniform01() * (spec.diag_max - spec.diag_min);
    }
    BlockSpec block;
    block.coupling = gaussian_matrix(rng_coupling, spec.rows, n);
    block.sigma = 2.0 * pdiag.minCoeff();
    block.lipschitz = 2.0 * pdiag.maxCoeff();
    block.constrained = false;
    block.oracle = make_quadratic_block(std::move(pdiag),
                                        gaussian_vector(rng_lin, n));
    blocks.push_back(std::move(block));
  }
  return ProblemInstance(std::move(blocks), std::move(rhs));
}

ReferenceSolution reference_toy_qp(const ProblemInstance& instance,
                                   double tol, long max_iterations) {
  require(instance.block_count() == 3, "toy QP has three blocks");
  require(tol > 0.0, "tol must be positive");
  const int p = instance.rows();

  const BlockSpec& b1 = instance.block(0);
  const BlockSpec& b2 = instance.block(1);
  const BlockSpec& b3 = instance.block(2);
  require(b1.oracle->kind() == "nonneg" &&
              b1.coupling.isIdentity(0.0),
          "block 1 must be the nonnegative block with identity coupling");
  const DiagQuadBlock* q2 = as_quadratic(b2);
  const DiagQuadBlock* q3 = as_quadratic(b3);
  require(q2 != nullptr && q3 != nullptr,
          "blocks 2 and 3 must be diagonal quadratics");
  require(b3.coupling.isApprox(-Matrix::Identity(p, p), 0.0),
          "block 3 coupling must be -I");
  require((q2->pdiag().array() > 0.0).all() &&
              (q3->pdiag().array() > 0.0).all(),
          "quadratic diagonals must be positive");

  const Matrix a = -b2.coupling;  // x1 - A x2 - x3 = rhs
  const Vector& lin_a = q2->lin();
  const Vector& lin_b = q3->lin();
  const Vector p_inv = q2->pdiag().cwiseInverse();
  const Vector q_inv = q3->pdiag().cwiseInverse();

  // Dual of min f2 + f3 s.t. A x2 + x3 + rhs >= 0, multiplier mu >= 0:
  //   h(mu) = (A'mu - a)' P^{-1} (A'mu - a)/4 + (mu - b)' Q^{-1} (mu - b)/4
  //           + mu' rhs,
  // grad h(mu) = A x2(mu) + x3(mu) + rhs  with the closed-form recoveries.
  const Matrix hessian =
      0.5 * (a * p_inv.asDiagonal() * a.transpose() +
             Matrix(q_inv.asDiagonal()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(hessian, Eigen::EigenvaluesOnly);
  const double lip = es.eigenvalues().maxCoeff();
  const double strong = es.eigenvalues().minCoeff();
  require(strong > 0.0, "dual must be strongly convex");

  const auto grad = [&](const Vector& mu) -> Vector {
    const Vector x2 = 0.5 * p_inv.cwiseProduct(a.transpose() * mu - lin_a);
    const Vector x3 = 0.5 * q_inv.cwiseProduct(mu - lin_b);
    return a * x2 + x3 + instance.rhs();
  };

  // Accelerated projected gradient with the constant momentum for strongly
  // convex objectives.
  const double sq = std::sqrt(strong / lip);
  const double beta = (1.0 - sq) / (1.0 + sq);
  Vector mu = Vector::Zero(p);
  Vector mu_prev = mu;
  Vector y = mu;
  for (long k = 0; k < max_iterations; ++k) {
    const Vector g = grad(mu);
    const double residual =
        (mu - (mu - g).cwiseMax(0.0)).lpNorm<Eigen::Infinity>();
    if (residual <= tol) break;
    mu_prev = mu;
    mu = (y - grad(y) / lip).cwiseMax(0.0);
    y = mu + beta * (mu - mu_prev);
  }

  ReferenceSolution ref;
  ref.primal_star.resize(3);
  ref.primal_star[1] = 0.5 * p_inv.cwiseProduct(a.transpose() * mu - lin_a);
  ref.primal_star[2] = 0.5 * q_inv.cwiseProduct(mu - lin_b);
  Vector x1 = (a * ref.primal_star[1] + ref.primal_star[2] + instance.rhs())
                  .cwiseMax(0.0);
  // Clean active set: where the multiplier is positive the constraint is
  // tight, and a stray +1e-12 would make the stationarity check see an
  // interior point.
  for (int i = 0; i < p; ++i) {
    if (mu(i) > 0.0) x1(i) = 0.0;
  }
  ref.primal_star[0] = std::move(x1);
  ref.dual_star = -mu;
  ref.kkt_residual = kkt_check(instance, ref, tol).max_violation;
  return ref;
}

ReferenceSolution reference_quadratic(const ProblemInstance& instance) {
  const int n = instance.block_count();
  const int p = instance.rows();
  std::vector<const DiagQuadBlock*> quads(n);
  for (int i = 0; i < n; ++i) {
    quads[i] = as_quadratic(instance.block(i));
    require(quads[i] != nullptr && !instance.block(i).constrained,
            "reference_quadratic needs unconstrained quadratic blocks");
    require((quads[i]->pdiag().array() > 0.0).all(),
            "reference_quadratic needs strictly positive diagonals");
  }

  // Stationarity A_i' l = 2 P_i x_i + a_i eliminates each block; feasibility
  // then gives (sum A_i (2P_i)^{-1} A_i') l = b + sum A_i (2P_i)^{-1} a_i.
  Matrix gram = Matrix::Zero(p, p);
  Vector rhs = instance.rhs();
  for (int i = 0; i < n; ++i) {
    const Matrix& a = instance.block(i).coupling;
    const Vector inv = (2.0 * quads[i]->pdiag()).cwiseInverse();
    gram += a * inv.asDiagonal() * a.transpose();
    rhs += a * inv.cwiseProduct(quads[i]->lin());
  }
  Eigen::LDLT<Matrix> ldlt(gram);
  Vector dual = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success ||
      (gram * dual - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm())) {
    dual = gram.completeOrthogonalDecomposition().solve(rhs);
  }

  ReferenceSolution ref;
  ref.primal_star.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vector inv = (2.0 * quads[i]->pdiag()).cwiseInverse();
    ref.primal_star[i] = inv.cwiseProduct(
        instance.block(i).coupling.transpose() * dual - quads[i]->lin());
  }
  ref.dual_star = std::move(dual);
  ref.kkt_residual = kkt_check(instance, ref, 1e-8).max_violation;
  return ref;
}

namespace {

// l1 dual certificate: A_S' l = sign(x_S*), |a_i' l| <= 1 elsewhere. Least
// squares first; if the off-support bound fails, polish by cyclic
// projections in z = A'l space onto the three constraint sets.
bool dual_certificate(const Matrix& a, const Vector& x_star, Vector* lambda) {
  const int cols = static_cast<int>(a.cols());
  std::vector<int> support;
  for (int i = 0; i < cols; ++i) {
    if (x_star(i) != 0.0) support.push_back(i);
  }
  if (support.empty()) {
    *lambda = Vector::Zero(a.rows());
    return true;
  }

  const int s = static_cast<int>(support.size());
  Matrix a_s(a.rows(), s);
  Vector sgn(s);
  for (int k = 0; k < s; ++k) {
    a_s.col(k) = a.col(support[k]);
    sgn(k) = x_star(support[k]) > 0.0 ? 1.0 : -1.0;
  }

  const auto certificate_ok = [&](const Vector& l) {
    double on = 0.0;
    for (int k = 0; k < s; ++k) {
      on = std::max(on, std::abs(a_s.col(k).dot(l) - sgn(k)));
    }
    double off = 0.0;
    for (int i = 0; i < cols; ++i) {
      if (x_star(i) == 0.0) {
        off = std::max(off, std::abs(a.col(i).dot(l)) - 1.0);
      }
    }
    return on <= 1e-10 && off <= 0.0;
  };

  Eigen::LDLT<Matrix> gram_s(Matrix(a_s.transpose() * a_s));
  Vector l = a_s * gram_s.solve(sgn);
  if (certificate_ok(l)) {
    *lambda = l;
    return true;
  }

  // Cyclic projections: z in range(A'), z_S = sgn, ||z_offS||_inf <= 1 - m.
  const double margin = 1e-6;
  Eigen::LLT<Matrix> aat(Matrix(a * a.transpose()));
  if (aat.info() != Eigen::Success) return false;
  Vector z = a.transpose() * l;
  for (int iter = 0; iter < 50000; ++iter) {
    for (int k = 0; k < s; ++k) z(support[k]) = sgn(k);
    for (int i = 0; i < cols; ++i) {
      if (x_star(i) == 0.0) {
        z(i) = std::clamp(z(i), -(1.0 - margin), 1.0 - margin);
      }
    }
    const Vector projected = a.transpose() * aat.solve(a * z);
    const double drift = (projected - z).lpNorm<Eigen::Infinity>();
    z = projected;
    if (drift <= 1e-14) break;
  }
  l = aat.solve(a * z);
  if (certificate_ok(l)) {
    *lambda = l;
    return true;
  }
  return false;
}

}  // namespace

BasisPursuitReference reference_basis_pursuit(const ProblemInstance& instance,
                                              const Vector& ground_truth,
                                              double noise_sigma) {
  const int n = instance.block_count();
  require(ground_truth.size() == n,
          "ground truth must have one entry per scalar block");
  Matrix a(instance.rows(), n);
  for (int i = 0; i < n; ++i) {
    require(instance.block(i).cols() == 1, "expected scalar blocks");
    a.col(i) = instance.block(i).coupling.col(0);
  }

  BasisPursuitReference out;
  out.solution.primal_star.resize(n);
  for (int i = 0; i < n; ++i) {
    out.solution.primal_star[i] = ground_truth.segment(i, 1);
  }
  out.ground_truth_residual = (a * ground_truth - instance.rhs()).norm();

  if (noise_sigma == 0.0) {
    Vector lambda;
    if (dual_certificate(a, ground_truth, &lambda)) {
      out.solution.dual_star = std::move(lambda);
      out.solution.kkt_residual =
          kkt_check(instance, out.solution, 1e-8).max_violation;
      out.dual_certified = true;
    }
  }
  return out;
}

}  // namespace admmcert

#pragma once

#include <cstdint>
#include <vector>

#include "admmcert/core.hpp"
#include "admmcert/oracles.hpp"

namespace admmcert {

/// min ||x||_1 s.t. A x = b with A ~ iid standard Gaussian, a planted
/// s-sparse solution, and optional Gaussian measurement noise. Each
/// coordinate is its own scalar l1 block. Stream order per seed: A
/// (column-major), support, nonzero values, noise.
struct BasisPursuitSpec {
  int rows = 300;       // p
  int cols = 1000;      // N, one scalar block per column
  int sparsity = 60;    // s
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct BasisPursuitInstance {
  ProblemInstance instance;
  Vector ground_truth;     // the planted sparse vector
  Vector noise;
  double suggested_gamma;  // 10 / ||b||_1
};

BasisPursuitInstance generate_basis_pursuit(const BasisPursuitSpec& spec);

/// min x2' P x2 + a' x2 + x3' Q x3 + b' x3
/// s.t. x1 - A x2 - x3 = 0,  x1 >= 0,
/// with P, Q diagonal with entries uniform in (0, 1), and A, a, b standard
/// Gaussian. Blocks in order: the constrained x1 (identity coupling), the
/// P-quadratic (coupling -A), the Q-quadratic (coupling -I, full row rank).
/// Stream order per seed: P, Q, A (column-major), a, b.
struct ToyQpSpec {
  int n1 = 20;
  int n2 = 50;
  int n3 = 20;
  std::uint64_t seed = 0;
};

ProblemInstance generate_toy_qp(const ToyQpSpec& spec);

/// Unconstrained strongly convex separable QP: every block a diagonal
/// quadratic with diag entries uniform in [diag_min, diag_max] and Gaussian
/// coupling. With dims[0] == rows the first coupling is square (and
/// generically nonsingular), so both the all-strongly-convex and the
/// full-column-rank certificate scenarios apply.
struct RandomQpSpec {
  int rows = 8;
  std::vector<int> dims = {8, 6, 7};
  double diag_min = 0.5;
  double diag_max = 1.5;
  std::uint64_t seed = 0;
};

ProblemInstance generate_random_qp(const RandomQpSpec& spec);

/// Reference solution of a toy-QP-shaped instance: eliminates x1, maximizes
/// the strongly concave dual in the multiplier mu >= 0 of A x2 + x3 >= 0 by
/// accelerated projected gradient with step 1 / lambda_max(dual Hessian),
/// then recovers x2, x3 in closed form and x1 = A x2 + x3. lambda* = -mu*.
/// Stops when the projected-gradient residual drops below tol; on hitting
/// the iteration cap the achieved residual is still reported in
/// kkt_residual via a full KKT evaluation.
ReferenceSolution reference_toy_qp(const ProblemInstance& instance,
                                   double tol = 1e-10,
                                   long max_iterations = 1000000);

/// Exact reference for an unconstrained separable quadratic instance with
/// all diagonal Hessians positive: solves the stationarity + feasibility
/// normal equations directly.
ReferenceSolution reference_quadratic(const ProblemInstance& instance);

struct BasisPursuitReference {
  ReferenceSolution solution;      // planted vector; dual present when certified
  bool dual_certified = false;     // an l1 dual certificate was found
  double ground_truth_residual = 0.0;  // ||A x* - b|| = ||noise||
};

/// Comparison point used for relative errors: the planted vector. In the
/// noise-free case a dual certificate for its l1-optimality is attempted
/// (exact on the support, infinity-norm feasible elsewhere); when found the
/// result is a full KKT pair. The planted vector's optimality is otherwise
/// assumed per the experimental protocol, not certified. In the noisy case
/// the planted vector is a comparison point only.
BasisPursuitReference reference_basis_pursuit(const ProblemInstance& instance,
                                              const Vector& ground_truth,
                                              double noise_sigma);

}  // namespace admmcert

// Acceptance suite: end-to-end checks of the certificates, solvers, and
// oracles on the reproduction instances. Prints one PASS/FAIL line per
// criterion; the exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "admmcert/detail/rng.hpp"
#include "admmcert/oracles.hpp"
#include "admmcert/problems.hpp"
#include "admmcert/solvers.hpp"
#include "admmcert/theory.hpp"

#include "test_oracles.hpp"

using namespace admmcert;
using theory::LyapunovWeight;

namespace {

// Seeds are pinned: the acceptance ranges are statements about a concrete
// reproducible instance, not about every random draw.
constexpr std::uint64_t kToySeed = 267;
constexpr std::uint64_t kBpSeed = 0;
constexpr std::uint64_t kQpSeed = 0;

struct Criterion {
  std::string label;
  std::function<bool(std::string&)> body;
  double budget_seconds = 0.0;  // 0 = no budget
};

bool check(bool condition, std::string& detail, const std::string& what) {
  if (!condition && detail.empty()) detail = what;
  return condition;
}

// ---------------------------------------------------------------------- 1
bool criterion_lemma1(std::string& detail) {
  bool ok = true;

  ProblemInstance toy = generate_toy_qp(ToyQpSpec{20, 50, 20, kToySeed});
  ReferenceSolution toy_ref = reference_toy_qp(toy, 1e-11);
  ok &= check(toy_ref.kkt_residual <= 1e-9, detail, "toy reference kkt");
  const double toy_gamma = 0.99 * theory::gamma_max_scenario1(toy);
  SolverConfig cfg;
  cfg.gamma = toy_gamma;
  cfg.max_iterations = 200;
  RunResult toy_run = run(toy, initial_state(toy), cfg, &toy_ref);
  for (std::size_t k = 0; k + 1 < toy_run.states.size(); ++k) {
    ok &= check(theory::check_lemma1(toy, toy_run.states[k],
                                     toy_run.states[k + 1], toy_ref, toy_gamma,
                                     1e-8)
                    .holds,
                detail, "toy lemma1 violated at iteration " + std::to_string(k));
  }

  BasisPursuitInstance bp =
      generate_basis_pursuit(BasisPursuitSpec{60, 200, 12, 0.0, kBpSeed});
  auto bp_ref = reference_basis_pursuit(bp.instance, bp.ground_truth, 0.0);
  ok &= check(bp_ref.dual_certified && bp_ref.solution.kkt_residual <= 1e-8,
              detail, "bp dual certificate");
  SolverConfig bp_cfg;
  bp_cfg.gamma = bp.suggested_gamma;
  bp_cfg.max_iterations = 200;
  RunResult bp_run =
      run(bp.instance, initial_state(bp.instance), bp_cfg, &bp_ref.solution);
  for (std::size_t k = 0; k + 1 < bp_run.states.size(); ++k) {
    ok &= check(theory::check_lemma1(bp.instance, bp_run.states[k],
                                     bp_run.states[k + 1], bp_ref.solution,
                                     bp_cfg.gamma, 1e-8)
                    .holds,
                detail, "bp lemma1 violated at iteration " + std::to_string(k));
  }
  return ok;
}

// ---------------------------------------------------------------------- 2
bool criterion_theorem1(std::string& detail) {
  bool ok = true;
  ProblemInstance toy = generate_toy_qp(ToyQpSpec{20, 50, 20, kToySeed});
  ReferenceSolution ref = reference_toy_qp(toy, 1e-11);
  const double gamma = 0.99 * theory::gamma_max_scenario1(toy);
  const double delta1 = theory::delta_scenario1(toy, gamma);

  ok &= check(delta1 > 0.0, detail, "delta1 not positive");
  ok &= check(gamma >= 1e-4 && gamma <= 1.0, detail, "gamma outside [1e-4, 1]");
  ok &= check(delta1 >= 1e-4 && delta1 <= 1.0, detail,
              "delta1 outside [1e-4, 1]");

  SolverConfig cfg;
  cfg.gamma = gamma;
  cfg.max_iterations = 100;
  RunResult rr = run(toy, initial_state(toy), cfg, &ref);
  const auto report = theory::check_qlinear(toy, rr.states, ref, gamma,
                                            LyapunovWeight::half_gamma, delta1,
                                            1e-8);
  ok &= check(report.all_hold, detail, "q-linear contraction violated");
  ok &= check(report.steps.size() == 100, detail, "expected 100 steps");

  const double phi0 =
      theory::lyapunov(toy, rr.states[0], ref, gamma,
                       LyapunovWeight::half_gamma)
          .value;
  double envelope = phi0;
  for (std::size_t k = 1; k < rr.states.size(); ++k) {
    envelope /= 1.0 + delta1;
    const double phi = theory::lyapunov(toy, rr.states[k], ref, gamma,
                                        LyapunovWeight::half_gamma)
                           .value;
    ok &= check(phi <= envelope * (1.0 + 1e-6), detail,
                "envelope violated at iteration " + std::to_string(k));
  }
  return ok;
}

// ---------------------------------------------------------------------- 3
bool criterion_theorems23(std::string& detail) {
  bool ok = true;
  RandomQpSpec spec;
  spec.rows = 8;
  spec.dims = {8, 6, 7};  // square nonsingular first coupling
  spec.seed = kQpSeed;
  ProblemInstance qp = generate_random_qp(spec);

  const auto scenarios = theory::matching_scenarios(qp);
  bool has2 = false, has3 = false;
  for (auto s : scenarios) {
    has2 |= s == theory::Scenario::scenario2;
    has3 |= s == theory::Scenario::scenario3;
  }
  ok &= check(has2 && has3, detail, "scenarios 2 and 3 must both match");

  ReferenceSolution ref = reference_quadratic(qp);
  ok &= check(ref.kkt_residual <= 1e-10, detail, "reference kkt");

  const double kappa = theory::compute_kappa(qp).kappa;
  const double gamma = 0.9 * theory::gamma_max_scenario23(qp);
  const double delta2 = theory::delta_scenario2(qp, gamma, kappa).delta2;
  const double delta6 = theory::delta_scenario3(qp, gamma, kappa).delta6;
  ok &= check(delta2 > 0.0 && delta6 > 0.0, detail, "deltas not positive");

  SolverConfig cfg;
  cfg.gamma = gamma;
  cfg.max_iterations = 200;
  RunResult rr = run(qp, initial_state(qp), cfg, &ref);  // lambda^0 = 0

  ok &= check(theory::check_qlinear(qp, rr.states, ref, gamma,
                                    LyapunovWeight::full_gamma, delta2, 1e-8)
                  .all_hold,
              detail, "theorem-2 contraction violated");
  ok &= check(theory::check_qlinear(qp, rr.states, ref, gamma,
                                    LyapunovWeight::full_gamma, delta6, 1e-8)
                  .all_hold,
              detail, "theorem-3 contraction violated");
  for (std::size_t k = 0; k + 1 < rr.states.size(); ++k) {
    ok &= check(theory::check_lemma3(qp, rr.states[k], rr.states[k + 1], ref,
                                     gamma, kappa, 1e-8)
                    .holds,
                detail, "lemma3 violated at iteration " + std::to_string(k));
  }
  return ok;
}

// ---------------------------------------------------------------------- 4
bool criterion_kappa(std::string& detail) {
  bool ok = true;
  detail::Rng rng(99);

  // full row rank stack: the toy coupling contains an identity block
  ProblemInstance toy = generate_toy_qp(ToyQpSpec{10, 15, 10, 5});
  const theory::KappaResult full = theory::compute_kappa(toy);
  ok &= check(full.details.full_row_rank, detail, "toy stack not full rank");
  const Matrix m_full = toy.stacked_coupling();
  for (int trial = 0; trial < 1000; ++trial) {
    Vector z(m_full.cols());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
    const Vector lambda = m_full * z;
    ok &= check(lambda.squaredNorm() <=
                    full.kappa * (m_full.transpose() * lambda).squaredNorm() *
                        (1.0 + 1e-10),
                detail, "full-rank kappa property violated");
  }

  // the rank-deficient hand example [[1,0],[1,0]]
  std::vector<BlockSpec> blocks(2);
  Vector a1(2);
  a1 << 1.0, 1.0;
  blocks[0].coupling = a1;
  blocks[0].oracle = make_quadratic_block(Vector::Constant(1, 0.5),
                                          Vector::Zero(1));
  blocks[0].sigma = 1.0;
  blocks[0].lipschitz = 1.0;
  Vector a2(2);
  a2 << 0.0, 0.0;
  blocks[1] = blocks[0];
  blocks[1].coupling = a2;
  Vector rhs(2);
  rhs << 0.5, 0.5;
  ProblemInstance rank1(blocks, rhs);
  const theory::KappaResult deficient = theory::compute_kappa(rank1);
  ok &= check(std::abs(deficient.kappa - 0.5) <= 1e-12, detail,
              "hand example kappa != 0.5");
  ok &= check(deficient.details.rank == 1, detail, "hand example rank");
  const Matrix m_r1 = rank1.stacked_coupling();
  for (int trial = 0; trial < 1000; ++trial) {
    Vector z(2);
    z << rng.gaussian(), rng.gaussian();
    const Vector lambda = m_r1 * z;
    ok &= check(lambda.squaredNorm() <=
                    deficient.kappa *
                        (m_r1.transpose() * lambda).squaredNorm() *
                        (1.0 + 1e-10),
                detail, "rank-deficient kappa property violated");
  }
  return ok;
}

// ---------------------------------------------------------------------- 5
bool criterion_formulas(std::string& detail) {
  bool ok = true;
  std::vector<BlockSpec> blocks;
  for (int i = 0; i < 3; ++i) {
    BlockSpec b;
    b.coupling = Matrix::Ones(1, 1);
    b.oracle = make_quadratic_block(Vector::Constant(1, 0.5), Vector::Zero(1));
    b.sigma = 1.0;
    b.lipschitz = 1.0;
    blocks.push_back(std::move(b));
  }
  ProblemInstance unit3(blocks, Vector::Zero(1));

  ok &= check(std::abs(theory::gamma_max_scenario1(unit3) - 1.0) <= 1e-12,
              detail, "gamma_max scenario1 != 1");
  ok &= check(std::abs(theory::gamma_max_scenario23(unit3) - 0.25) <= 1e-12,
              detail, "gamma_max scenario23 != 1/4");
  ok &= check(
      std::abs(theory::delta_scenario1(unit3, 0.5) - 2.0 / 7.0) <= 1e-12,
      detail, "delta1 != 2/7");

  const auto d2 = theory::delta_scenario2(unit3, 0.2, 1.0);
  ok &= check(std::abs(d2.aux.delta3 - 2.0 / 27.0) <= 1e-12, detail,
              "delta3 != 2/27");
  ok &= check(std::abs(d2.aux.delta4 - 0.25) <= 1e-12, detail,
              "delta4 != 1/4");
  ok &= check(std::abs(d2.aux.delta5 - 1.0 / 28.0) <= 1e-12, detail,
              "delta5 != 1/28");
  ok &= check(std::abs(d2.delta2 - 1.0 / 28.0) <= 1e-12, detail,
              "delta2 != 1/28");

  const auto d6 = theory::delta_scenario3(unit3, 0.2, 1.0);
  ok &= check(std::abs(d6.delta6 - 0.04 / 4.32) <= 1e-12, detail,
              "delta6 != 0.04/4.32");
  return ok;
}

// ---------------------------------------------------------------------- 6
bool criterion_oracles(std::string& detail) {
  bool ok = true;
  detail::Rng rng(7);

  for (int trial = 0; trial < 100; ++trial) {
    Vector a(3), t(3);
    for (int i = 0; i < 3; ++i) a(i) = rng.gaussian();
    for (int i = 0; i < 3; ++i) t(i) = 2.0 * rng.gaussian();
    const double rho = 0.2 + 2.0 * rng.uniform01();
    BlockSpec block;
    block.coupling = a;
    block.oracle = make_l1_block();
    const double got = solve_block_subproblem(block, rho, t)(0);
    // the minimizer cannot exceed the pull of the quadratic term
    const double bracket = std::abs(a.dot(t)) / a.squaredNorm() + 1.0;
    const double expected = testoracle::grid_minimize(
        [&](double x) {
          return std::abs(x) + 0.5 * rho * (a * x - t).squaredNorm();
        },
        -bracket, bracket);
    ok &= check(std::abs(got - expected) <= 1e-6, detail,
                "soft threshold disagrees with the grid oracle");
  }

  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4, p = 3;
    Matrix a(p, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < p; ++i) a(i, j) = rng.gaussian();
    Vector pd(n), lin(n), t(p);
    for (int i = 0; i < n; ++i) pd(i) = 0.1 + rng.uniform01();
    for (int i = 0; i < n; ++i) lin(i) = rng.gaussian();
    for (int i = 0; i < p; ++i) t(i) = rng.gaussian();
    const double rho = 0.5 + rng.uniform01();
    BlockSpec block;
    block.coupling = a;
    block.oracle = make_quadratic_block(pd, lin);
    const Vector x = solve_block_subproblem(block, rho, t);
    const Matrix m = 2.0 * Matrix(pd.asDiagonal()) + rho * a.transpose() * a;
    const Vector rhs = rho * a.transpose() * t - lin;
    ok &= check((m * x - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()),
                detail, "quadratic oracle normal equations");
  }

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ProblemInstance mini = generate_toy_qp(ToyQpSpec{2, 3, 2, seed});
    ReferenceSolution ref = reference_toy_qp(mini, 1e-12);
    const auto* q2 =
        dynamic_cast<const DiagQuadBlock*>(mini.block(1).oracle.get());
    const auto* q3 =
        dynamic_cast<const DiagQuadBlock*>(mini.block(2).oracle.get());
    const auto brute = testoracle::toy_active_set(
        Matrix(-mini.block(1).coupling), q2->pdiag(), q2->lin(), q3->pdiag(),
        q3->lin(), mini.rhs());
    ok &= check(brute.found, detail, "active-set enumeration found no point");
    if (brute.found) {
      ok &= check((ref.primal_star[0] - brute.x1).norm() <= 1e-8 &&
                      (ref.primal_star[1] - brute.x2).norm() <= 1e-8 &&
                      (ref.primal_star[2] - brute.x3).norm() <= 1e-8,
                  detail, "reference oracle disagrees with enumeration");
    }
  }
  return ok;
}

// ---------------------------------------------------------------------- 7
bool criterion_comparison(std::string& detail) {
  int gs_le_j = 0, gs_le_pj = 0;
  const int budget = 200;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    BasisPursuitInstance bp =
        generate_basis_pursuit(BasisPursuitSpec{60, 200, 12, 0.0, seed});
    auto ref = reference_basis_pursuit(bp.instance, bp.ground_truth, 0.0);
    const double gamma = bp.suggested_gamma;
    const auto iterations_to_eps = [&](SolverConfig cfg) {
      const RunResult rr =
          run(bp.instance, initial_state(bp.instance), cfg, &ref.solution);
      for (const TraceRecord& rec : rr.trace) {
        if (rec.relative_error && *rec.relative_error <= 1e-4) {
          return rec.iteration;
        }
      }
      return budget;
    };
    SolverConfig gs;
    gs.gamma = gamma;
    gs.max_iterations = budget;
    SolverConfig jc = gs;
    jc.variant = Variant::jacobian;
    SolverConfig pj = gs;
    pj.variant = Variant::prox_jacobian;
    const double tau = 1.01 * gamma * (bp.instance.block_count() - 1.0);
    std::vector<Matrix> weights;
    for (const BlockSpec& b : bp.instance.blocks()) {
      weights.push_back(tau * b.coupling.squaredNorm() *
                        Matrix::Identity(1, 1));
    }
    pj.prox_weights = std::move(weights);

    const int it_gs = iterations_to_eps(gs);
    if (it_gs <= iterations_to_eps(jc)) ++gs_le_j;
    if (it_gs <= iterations_to_eps(pj)) ++gs_le_pj;
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "gauss-seidel no slower in %d/10 (vs jacobian) and %d/10 (vs "
                "prox-jacobian) seeds",
                gs_le_j, gs_le_pj);
  detail = buf;
  return gs_le_j >= 8 && gs_le_pj >= 8;
}

// ---------------------------------------------------------------------- 8
bool criterion_rlinear(std::string& detail) {
  bool ok = true;
  ProblemInstance toy = generate_toy_qp(ToyQpSpec{20, 50, 20, kToySeed});
  ReferenceSolution ref = reference_toy_qp(toy, 1e-11);
  SolverConfig cfg;
  cfg.gamma = 0.99 * theory::gamma_max_scenario1(toy);
  cfg.max_iterations = 200;
  RunResult rr = run(toy, initial_state(toy), cfg, &ref);

  const auto report = theory::check_rlinear(toy, rr.states, ref, 1e-8);
  for (const auto& fit : report.fits) {
    ok &= check(fit.valid && fit.ratio < 1.0, detail,
                "fit for " + fit.quantity + " not geometric");
  }
  ok &= check(report.xn_bound_checked && report.xn_bound_holds, detail,
              "last-block dual bound violated");
  return ok;
}

// ---------------------------------------------------------------------- 9
bool criterion_slack(std::string& detail) {
  bool ok = true;
  ProblemInstance toy = generate_toy_qp(ToyQpSpec{20, 50, 20, kToySeed});
  const auto* q2 =
      dynamic_cast<const DiagQuadBlock*>(toy.block(1).oracle.get());
  const auto* q3 =
      dynamic_cast<const DiagQuadBlock*>(toy.block(2).oracle.get());
  const Vector x2_free =
      -0.5 * q2->pdiag().cwiseInverse().cwiseProduct(q2->lin());
  const Vector x3_free =
      -0.5 * q3->pdiag().cwiseInverse().cwiseProduct(q3->lin());

  // inequality-constrained variant with the optimum strictly interior
  std::vector<BlockSpec> blocks = {toy.block(1), toy.block(2)};
  const Vector b = toy.block(1).coupling * x2_free +
                   toy.block(2).coupling * x3_free + Vector::Ones(toy.rows());
  ProblemInstance ineq(blocks, b);

  SolverConfig cfg;
  cfg.variant = Variant::slack_inequality;
  cfg.gamma = 0.99 * theory::gamma_max_scenario1(slack_augmented(ineq));
  cfg.max_iterations = 500;
  ReferenceSolution free_ref;
  free_ref.primal_star = {x2_free, x3_free};
  RunResult rr = run(ineq, initial_slack_state(ineq), cfg, &free_ref);

  ok &= check(rr.trace.back().relative_error &&
                  *rr.trace.back().relative_error <= 1e-6,
              detail, "did not reach the unconstrained optimum");

  // the slack update must equal its closed form exactly, every step
  for (std::size_t k = 0; k + 1 < rr.states.size(); ++k) {
    const IterateState& cur = rr.states[k];
    Vector acc = Vector::Zero(ineq.rows());
    for (int j = 0; j < ineq.block_count(); ++j) {
      acc += ineq.block(j).coupling * cur.primal[j + 1];
    }
    const Vector closed = (b + cur.dual / cfg.gamma - acc).cwiseMax(0.0);
    ok &= check(closed == rr.states[k + 1].primal[0], detail,
                "slack update differs from its closed form at iteration " +
                    std::to_string(k));
  }
  return ok;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"lemma 1 descent holds at all 200 gauss-seidel iterations "
       "(toy QP and basis pursuit)",
       criterion_lemma1, 10.0},
      {"theorem 1 q-linear contraction on the toy QP at gamma = "
       "0.99 gamma_max, gamma and delta1 in [1e-4, 1]",
       criterion_theorem1, 10.0},
      {"theorems 2 and 3 plus lemma 3 on the strongly convex synthetic QP",
       criterion_theorems23, 10.0},
      {"kappa norm-equivalence on full-rank and rank-deficient stacks "
       "(hand value 1/2), 1000 samples each",
       criterion_kappa, 0.0},
      {"certificate formula spot values to 1e-12", criterion_formulas, 0.0},
      {"subproblem oracles vs grid search, normal equations, and "
       "active-set enumeration",
       criterion_oracles, 0.0},
      {"gauss-seidel beats jacobian and prox-jacobian in at least 8/10 "
       "basis-pursuit seeds at 1e-4",
       criterion_comparison, 60.0},
      {"r-linear envelopes below one and the last-block dual bound",
       criterion_rlinear, 0.0},
      {"slack-variable solver reaches the interior optimum with the exact "
       "closed-form slack update",
       criterion_slack, 0.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool passed = false;
    try {
      passed = criteria[i].body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (criteria[i].budget_seconds > 0.0 &&
        seconds >= criteria[i].budget_seconds) {
      passed = false;
      detail = "runtime budget exceeded";
    }
    std::printf("[%s] criterion %zu: %s [%.2f s]%s%s\n",
                passed ? "PASS" : "FAIL", i + 1, criteria[i].label.c_str(),
                seconds, detail.empty() ? "" : " -- ", detail.c_str());
    if (!passed) ++failures;
  }
  return failures;
}

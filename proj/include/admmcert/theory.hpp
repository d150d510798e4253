#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "admmcert/core.hpp"

namespace admmcert::theory {

/// The three sufficient-condition sets for global linear convergence.
///   scenario1: sigma_2..sigma_N > 0, grad f_N Lipschitz, block N
///              unconstrained, A_N full row rank.
///   scenario2: all sigma_i > 0, all gradients Lipschitz, no constraints.
///   scenario3: sigma_2..sigma_N > 0, all gradients Lipschitz, no
///              constraints, A_1 full column rank.
enum class Scenario { scenario1, scenario2, scenario3, none };

std::string to_string(Scenario s);

struct RankDetails {
  int rank = 0;
  int rows = 0;
  bool full_row_rank = false;      // case (i) of the kappa definition
  bool ambiguous = false;          // a singular value sits near the threshold
  double singular_threshold = 0.0;
  std::vector<int> selected_rows;  // row basis used in case (ii)
};

struct KappaResult {
  double kappa = 0.0;
  RankDetails details;
};

/// All scenarios whose conditions the instance satisfies (possibly empty).
std::vector<Scenario> matching_scenarios(const ProblemInstance& instance,
                                         double rank_tol = -1.0);

/// The matching scenario yielding the largest certified contraction delta
/// at gamma = 0.99 * (its own gamma bound); Scenario::none when nothing
/// matches.
Scenario classify_scenario(const ProblemInstance& instance,
                           double rank_tol = -1.0);

/// Norm-equivalence constant on the range space of M = [A_1, ..., A_N]:
/// ||lambda||^2 <= kappa ||M' lambda||^2 for all lambda in range(M).
/// Case (i), full row rank: kappa = 1 / lambda_min(M M').
/// Case (ii), rank r < p: a pivoted orthogonal factorization of M' selects
/// r independent rows; with M = [I; B] M_r after the induced permutation
/// and E = (I + B'B) M_r, kappa = lambda_max(I + B'B) / lambda_min(E E').
/// The selected rows are recorded since kappa depends on the basis choice.
/// rank_tol < 0 selects the default max(p, sum n_i) * machine epsilon.
KappaResult compute_kappa(const ProblemInstance& instance,
                          double rank_tol = -1.0);

/// Largest penalty certified under scenario 1:
///   min_{i=2..N-1} 4 sigma_i / ((2N-i)(i-1) lmax(A_i'A_i))
///   and 4 sigma_N / ((N+1)(N-2) lmax(A_N'A_N)).
/// Empty or vanishing-factor terms contribute +inf; a required sigma_i = 0
/// yields 0 (not certifiable).
double gamma_max_scenario1(const ProblemInstance& instance);

/// Largest penalty certified under scenarios 2 and 3: denominators
/// 3 (2N-i)(i-1) lmax(A_i'A_i) and (3N^2 - 3N - 2) lmax(A_N'A_N).
double gamma_max_scenario23(const ProblemInstance& instance);

/// Contraction rate delta_1 of the scenario-1 certificate at this gamma;
/// nonpositive when gamma is at or beyond the scenario-1 bound.
double delta_scenario1(const ProblemInstance& instance, double gamma);

struct DeltaAux {
  double delta3 = 0.0;
  double delta4 = 0.0;
  double delta5 = 0.0;
};

struct Delta2Result {
  double delta2 = 0.0;
  DeltaAux aux;
};

struct Delta3Result {
  double delta6 = 0.0;
  DeltaAux aux;
};

/// delta_2 = min{ sigma_1 gamma / (kappa L_1^2), delta_3, delta_4, delta_5 }.
Delta2Result delta_scenario2(const ProblemInstance& instance, double gamma,
                             double kappa);

/// delta_6 = min{ gamma^2 / (4 kappa gamma^2 (N-1) lmax(A_1'A_1)
///                 + 4 kappa L_1^2 / lmin(A_1'A_1)), delta_3..delta_5 }.
Delta3Result delta_scenario3(const ProblemInstance& instance, double gamma,
                             double kappa);

enum class LyapunovWeight { half_gamma, full_gamma };

struct LyapunovValue {
  double value = 0.0;
  LyapunovWeight weight = LyapunovWeight::half_gamma;
  double weight_coefficient = 0.0;  // gamma/2 or gamma
};

/// Phi = w * sum_{i=1}^{N-1} || sum_{j=i+1}^{N} A_j (x_j* - x_j) ||^2
///       + (1/(2 gamma)) || lambda* - lambda ||^2,  w in {gamma/2, gamma}.
/// half_gamma is the scenario-1 merit function, full_gamma the one for
/// scenarios 2 and 3.
LyapunovValue lyapunov(const ProblemInstance& instance,
                       const IterateState& state,
                       const ReferenceSolution& reference, double gamma,
                       LyapunovWeight weight);

struct InequalityCheck {
  bool holds = false;
  double slack = 0.0;  // lhs - rhs; nonnegative (within tolerance) when valid
  double scale = 0.0;  // largest participating term, basis of the tolerance
};

/// Per-iteration descent inequality of the half_gamma merit function for a
/// Gauss-Seidel step: the Lyapunov decrease dominates the sigma-weighted
/// primal errors plus the coupling-residual term. Unconditional in gamma.
InequalityCheck check_lemma1(const ProblemInstance& instance,
                             const IterateState& state_k,
                             const IterateState& state_k1,
                             const ReferenceSolution& reference, double gamma,
                             double rel_tol = 1e-8);

/// Dual-error bound under scenarios 2/3 with lambda^0 in range[A_1..A_N]:
/// ||l^{k+1}-l*||^2 <= sum_i 2 kappa L_i^2 ||x_i^{k+1}-x_i*||^2
///   + sum_{i<N} 4 kappa gamma^2 lmax(A_i'A_i) (||s_i^k||^2 + ||s_i^{k+1}||^2)
/// with s_i^k = sum_{j>i} A_j (x_j^k - x_j*).
InequalityCheck check_lemma3(const ProblemInstance& instance,
                             const IterateState& state_k,
                             const IterateState& state_k1,
                             const ReferenceSolution& reference, double gamma,
                             double kappa, double rel_tol = 1e-8);

struct QLinearStep {
  int iteration = 0;   // k of the pair (k, k+1)
  bool holds = false;
  double factor = 0.0;  // empirical Phi^{k+1} / Phi^k
  double slack = 0.0;
};

struct QLinearReport {
  bool all_hold = false;
  std::vector<QLinearStep> steps;
};

/// Checks Phi^k >= (1 + delta) Phi^{k+1} across consecutive states, with
/// the given merit weighting, and reports the empirical contraction factor
/// per step.
QLinearReport check_qlinear(const ProblemInstance& instance,
                            std::span<const IterateState> states,
                            const ReferenceSolution& reference, double gamma,
                            LyapunovWeight weight, double delta,
                            double rel_tol = 1e-8);

struct GeometricFit {
  std::string quantity;
  bool valid = false;   // false when the series is constant or all zero
  double ratio = 0.0;   // fitted per-iteration factor
  double log10_start = 0.0;
};

struct RLinearReport {
  std::vector<GeometricFit> fits;  // ||l^k - l*||, ||A_i(x_i^k - x_i*)||, ||x_N^k - x_N*||
  bool xn_bound_checked = false;   // requires sigma_N > 0
  bool xn_bound_holds = false;     // ||x_N^{k+1}-x_N*|| <= (||A_N||/sigma_N)||l^{k+1}-l*||
  double xn_bound_max_violation = 0.0;  // relative
};

/// Geometric-decay fits for the per-iteration error norms of a certified
/// run, plus the block-N error bound from the R-linear corollary.
RLinearReport check_rlinear(const ProblemInstance& instance,
                            std::span<const IterateState> states,
                            const ReferenceSolution& reference,
                            double rel_tol = 1e-8);

struct ScenarioCertificate {
  Scenario scenario = Scenario::none;
  double gamma_bound = 0.0;
  double gamma = 0.0;   // the gamma the delta was evaluated at
  double delta = 0.0;
  DeltaAux aux;         // meaningful for scenarios 2/3
  bool certified = false;  // gamma below the bound and delta > 0
};

struct CertificateReport {
  Scenario scenario = Scenario::none;  // best certified scenario
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double gamma_max = 0.0;   // bound of the selected scenario
  double gamma = 0.0;       // gamma used for the headline delta
  double delta = 0.0;       // headline (largest certified) delta
  DeltaAux auxiliary;       // delta_3..delta_5 when scenarios 2/3 apply
  RankDetails rank_details;
  std::vector<ScenarioCertificate> certificates;  // all matching scenarios

  bool certified() const { return scenario != Scenario::none && delta > 0.0; }
};

/// Evaluates every matching scenario. gamma <= 0 selects the automatic
/// choice 0.99 * (each scenario's own bound); otherwise the same explicit
/// gamma is used for all scenarios.
CertificateReport certify(const ProblemInstance& instance, double gamma = 0.0,
                          double rank_tol = -1.0);

}  // namespace admmcert::theory

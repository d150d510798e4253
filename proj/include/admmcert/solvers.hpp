#pragma once

#include <optional>
#include <vector>

#include "admmcert/core.hpp"

namespace admmcert {

enum class Variant { gauss_seidel, jacobian, prox_jacobian, slack_inequality };

struct SolverConfig {
  Variant variant = Variant::gauss_seidel;
  double gamma = 1.0;  // penalty parameter
  double alpha = 1.0;  // dual step-size factor; must be 1 except prox_jacobian
  std::optional<std::vector<Matrix>> prox_weights;  // prox_jacobian only
  int max_iterations = 100;
  double stop_tolerance = 0.0;  // on max(primal residual, dual change); 0 = off
};

struct TraceRecord {
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_change = 0.0;  // || lambda^{k+1} - lambda^k ||
  std::optional<double> relative_error;  // ||x - x*|| / ||x*||, stacked
  std::optional<double> lyapunov;        // filled by callers via theory
};

/// One Gauss-Seidel sweep: blocks in index order, each using the sweep's
/// fresh values for preceding blocks, then the undamped dual update.
IterateState step_gauss_seidel(const ProblemInstance& instance,
                               const IterateState& state,
                               const SolverConfig& config);

/// One Jacobian sweep: every block subproblem sees only iteration-k values.
IterateState step_jacobian(const ProblemInstance& instance,
                           const IterateState& state,
                           const SolverConfig& config);

/// Jacobian sweep plus (1/2)||x_i - x_i^k||^2_{P_i} in each subproblem and
/// the damped dual update with factor alpha.
IterateState step_prox_jacobian(const ProblemInstance& instance,
                                const IterateState& state,
                                const SolverConfig& config);

/// One sweep for the inequality-constrained reading sum A_i x_i <= b.
/// `state` carries the slack block x_0 (dimension p) in front; x_0 is
/// updated by clamping, the remaining blocks Gauss-Seidel style.
IterateState step_slack_inequality(const ProblemInstance& instance,
                                   const IterateState& state,
                                   const SolverConfig& config);

/// The equality reformulation x_0 + sum A_i x_i = b, x_0 >= 0, used by the
/// slack variant: the original blocks preceded by a nonnegative slack block
/// with identity coupling.
ProblemInstance slack_augmented(const ProblemInstance& instance);

/// x = 0, lambda = 0, iteration 0.
IterateState initial_state(const ProblemInstance& instance);

/// Zero state carrying the extra slack block in front.
IterateState initial_slack_state(const ProblemInstance& instance);

/// ||x - x*|| / ||x*|| over the stacked primal vector. When the state has
/// one more block than the reference (a slack run), the leading slack block
/// is skipped. nullopt when ||x*|| = 0.
std::optional<double> relative_error(const IterateState& state,
                                     const ReferenceSolution& reference);

struct RunResult {
  std::vector<TraceRecord> trace;
  std::vector<IterateState> states;  // states[0] is the initial state

  const IterateState& final_state() const { return states.back(); }
};

/// Applies the configured step until the iteration budget or the stop
/// tolerance is reached. Deterministic for fixed inputs. For the slack
/// variant, residuals are those of the augmented equality problem.
RunResult run(const ProblemInstance& instance, const IterateState& initial,
              const SolverConfig& config,
              const ReferenceSolution* reference = nullptr);

}  // namespace admmcert

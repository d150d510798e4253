#include "admmcert/solvers.hpp"

#include <cmath>

#include "admmcert/oracles.hpp"

namespace admmcert {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void validate_config(const ProblemInstance& instance,
                     const SolverConfig& config) {
  require(config.gamma > 0.0, "gamma must be positive");
  require(config.alpha > 0.0, "alpha must be positive");
  require(config.max_iterations >= 0, "max_iterations must be nonnegative");
  require(config.stop_tolerance >= 0.0, "stop_tolerance must be nonnegative");
  const bool has_prox = config.prox_weights.has_value();
  if (config.variant == Variant::prox_jacobian) {
    require(has_prox, "prox_jacobian requires prox_weights");
    require(static_cast<int>(config.prox_weights->size()) ==
                instance.block_count(),
            "one prox weight per block required");
    for (int i = 0; i < instance.block_count(); ++i) {
      const Matrix& w = (*config.prox_weights)[i];
      require(w.rows() == instance.block(i).cols() &&
                  w.cols() == instance.block(i).cols(),
              "prox weight dimension mismatch");
      require(w.isApprox(w.transpose()), "prox weights must be symmetric");
      require(Eigen::LDLT<Matrix>(w).isPositive(),
              "prox weights must be positive semidefinite");
    }
  } else {
    require(!has_prox, "prox_weights only valid for prox_jacobian");
    require(config.alpha == 1.0, "alpha must be 1 for this variant");
  }
}

void validate_state(const ProblemInstance& instance,
                    const IterateState& state) {
  require(static_cast<int>(state.primal.size()) == instance.block_count(),
          "state block count mismatch");
  for (int i = 0; i < instance.block_count(); ++i) {
    require(state.primal[i].size() == instance.block(i).cols(),
            "state block dimension mismatch");
  }
  require(state.dual.size() == instance.rows(), "dual dimension mismatch");
}

// Sum of A_j x_j over j != i, ascending j; `products` holds A_j x_j with
// entries already replaced by their sweep-fresh values where applicable.
Vector partial_sum_skipping(const std::vector<Vector>& products, int skip,
                            int rows) {
  Vector acc = Vector::Zero(rows);
  for (int j = 0; j < static_cast<int>(products.size()); ++j) {
    if (j != skip) acc += products[j];
  }
  return acc;
}

IterateState sweep(const ProblemInstance& instance, const IterateState& state,
                   const SolverConfig& config, bool gauss_seidel,
                   bool with_prox) {
  const int n = instance.block_count();
  const int p = instance.rows();
  const double gamma = config.gamma;

  std::vector<Vector> products(n);
  for (int i = 0; i < n; ++i) {
    products[i] = instance.block(i).coupling * state.primal[i];
  }
  const Vector base = instance.rhs() + state.dual / gamma;

  IterateState next;
  next.primal.resize(n);
  next.iteration = state.iteration + 1;

  for (int i = 0; i < n; ++i) {
    const Vector target = base - partial_sum_skipping(products, i, p);
    if (with_prox) {
      next.primal[i] =
          solve_block_subproblem(instance.block(i), gamma, target,
                                 &(*config.prox_weights)[i], &state.primal[i]);
    } else {
      next.primal[i] =
          solve_block_subproblem(instance.block(i), gamma, target);
    }
    if (gauss_seidel) {
      products[i] = instance.block(i).coupling * next.primal[i];
    }
  }

  Vector residual = -instance.rhs();
  for (int i = 0; i < n; ++i) {
    if (gauss_seidel) {
      residual += products[i];  // already the fresh products
    } else {
      residual += instance.block(i).coupling * next.primal[i];
    }
  }
  next.dual = state.dual - (config.alpha * gamma) * residual;
  return next;
}

}  // namespace

IterateState step_gauss_seidel(const ProblemInstance& instance,
                               const IterateState& state,
                               const SolverConfig& config) {
  require(config.variant == Variant::gauss_seidel, "variant mismatch");
  validate_config(instance, config);
  validate_state(instance, state);
  return sweep(instance, state, config, /*gauss_seidel=*/true,
               /*with_prox=*/false);
}

IterateState step_jacobian(const ProblemInstance& instance,
                           const IterateState& state,
                           const SolverConfig& config) {
  require(config.variant == Variant::jacobian, "variant mismatch");
  validate_config(instance, config);
  validate_state(instance, state);
  return sweep(instance, state, config, /*gauss_seidel=*/false,
               /*with_prox=*/false);
}

IterateState step_prox_jacobian(const ProblemInstance& instance,
                                const IterateState& state,
                                const SolverConfig& config) {
  require(config.variant == Variant::prox_jacobian, "variant mismatch");
  validate_config(instance, config);
  validate_state(instance, state);
  return sweep(instance, state, config, /*gauss_seidel=*/false,
               /*with_prox=*/true);
}

IterateState step_slack_inequality(const ProblemInstance& instance,
                                   const IterateState& state,
                                   const SolverConfig& config) {
  require(config.variant == Variant::slack_inequality, "variant mismatch");
  const ProblemInstance augmented = slack_augmented(instance);
  SolverConfig gs = config;
  gs.variant = Variant::gauss_seidel;
  validate_config(augmented, gs);
  validate_state(augmented, state);
  return sweep(augmented, state, gs, /*gauss_seidel=*/true,
               /*with_prox=*/false);
}

ProblemInstance slack_augmented(const ProblemInstance& instance) {
  const int p = instance.rows();
  BlockSpec slack;
  slack.coupling = Matrix::Identity(p, p);
  slack.oracle = make_nonneg_block(p);
  slack.sigma = 0.0;
  slack.lipschitz = kUnboundedLipschitz;
  slack.constrained = true;
  std::vector<BlockSpec> blocks;
  blocks.reserve(instance.block_count() + 1);
  blocks.push_back(std::move(slack));
  for (const BlockSpec& b : instance.blocks()) blocks.push_back(b);
  return ProblemInstance(std::move(blocks), instance.rhs());
}

IterateState initial_state(const ProblemInstance& instance) {
  IterateState state;
  state.primal.reserve(instance.block_count());
  for (const BlockSpec& b : instance.blocks()) {
    state.primal.push_back(Vector::Zero(b.cols()));
  }
  state.dual = Vector::Zero(instance.rows());
  state.iteration = 0;
  return state;
}

IterateState initial_slack_state(const ProblemInstance& instance) {
  IterateState state = initial_state(instance);
  state.primal.insert(state.primal.begin(), Vector::Zero(instance.rows()));
  return state;
}

std::optional<double> relative_error(const IterateState& state,
                                     const ReferenceSolution& reference) {
  const std::size_t nref = reference.primal_star.size();
  std::size_t offset = 0;
  if (state.primal.size() == nref + 1) {
    offset = 1;  // slack run against a reference for the original blocks
  } else if (state.primal.size() != nref) {
    throw std::invalid_argument("relative_error: block count mismatch");
  }
  double err2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t i = 0; i < nref; ++i) {
    err2 += (state.primal[i + offset] - reference.primal_star[i]).squaredNorm();
    ref2 += reference.primal_star[i].squaredNorm();
  }
  if (ref2 == 0.0) return std::nullopt;
  return std::sqrt(err2) / std::sqrt(ref2);
}

RunResult run(const ProblemInstance& instance, const IterateState& initial,
              const SolverConfig& config, const ReferenceSolution* reference) {
  const bool slack = config.variant == Variant::slack_inequality;
  const ProblemInstance* effective = &instance;
  std::optional<ProblemInstance> augmented;
  SolverConfig step_config = config;
  if (slack) {
    augmented.emplace(slack_augmented(instance));
    effective = &*augmented;
    step_config.variant = Variant::gauss_seidel;
  }
  validate_config(*effective, step_config);
  validate_state(*effective, initial);

  const bool gs = step_config.variant == Variant::gauss_seidel;
  const bool prox = step_config.variant == Variant::prox_jacobian;

  RunResult result;
  result.states.reserve(config.max_iterations + 1);
  result.trace.reserve(config.max_iterations);
  result.states.push_back(initial);

  for (int k = 0; k < config.max_iterations; ++k) {
    const IterateState& current = result.states.back();
    IterateState next = sweep(*effective, current, step_config, gs, prox);

    TraceRecord rec;
    rec.iteration = next.iteration;
    rec.primal_residual = primal_residual(*effective, next);
    rec.dual_change = (next.dual - current.dual).norm();
    if (reference != nullptr) {
      rec.relative_error = relative_error(next, *reference);
    }
    result.states.push_back(std::move(next));
    result.trace.push_back(rec);

    if (config.stop_tolerance > 0.0 &&
        std::max(rec.primal_residual, rec.dual_change) <=
            config.stop_tolerance) {
      break;
    }
  }
  return result;
}

}  // namespace admmcert

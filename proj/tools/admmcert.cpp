// Command-line harness: generate experiment instances, run the multi-block
// solvers, certify linear convergence, and verify the per-iteration
// inequalities. Exit codes: 0 success/certified, 2 not certifiable,
// 3 inequality-check failure, 4 I/O error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "admmcert/io.hpp"
#include "admmcert/problems.hpp"
#include "admmcert/solvers.hpp"
#include "admmcert/theory.hpp"

using namespace admmcert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotCertifiable = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitIo = 4;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

Variant parse_variant(const std::string& name) {
  if (name == "gs" || name == "gauss-seidel") return Variant::gauss_seidel;
  if (name == "jacobian") return Variant::jacobian;
  if (name == "prox-jacobian") return Variant::prox_jacobian;
  if (name == "slack") return Variant::slack_inequality;
  fail(kExitIo, "unknown variant '" + name + "'");
}

std::vector<Matrix> default_prox_weights(const ProblemInstance& instance,
                                         double gamma, double alpha,
                                         double tau) {
  // tau <= 0 selects the smallest weight with a convergence guarantee,
  // P_i = 1.01 * gamma * (N/(2-alpha) - 1) * lmax(A_i'A_i) * I.
  if (tau <= 0.0) {
    tau = 1.01 * gamma * (instance.block_count() / (2.0 - alpha) - 1.0);
  }
  std::vector<Matrix> weights;
  weights.reserve(instance.block_count());
  for (const BlockSpec& b : instance.blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        Matrix(b.coupling.transpose() * b.coupling), Eigen::EigenvaluesOnly);
    weights.push_back(tau * es.eigenvalues().maxCoeff() *
                      Matrix::Identity(b.cols(), b.cols()));
  }
  return weights;
}

io::StoredInstance load_or_fail(const std::string& path) {
  try {
    return io::load_instance(path);
  } catch (const io::IoError& e) {
    fail(kExitIo, e.what());
  }
}

ReferenceSolution oracle_reference(const io::StoredInstance& stored) {
  const std::string family = stored.meta.value("family", "");
  if (family == "basis_pursuit") {
    if (!stored.meta.contains("planted")) {
      fail(kExitIo, "instance has no planted ground truth");
    }
    Vector x(stored.instance.block_count());
    const auto& planted = stored.meta.at("planted");
    const auto& arr = planted.at("x");
    for (int i = 0; i < x.size(); ++i) x(i) = arr.at(i).get<double>();
    const double sigma = planted.value("noise_sigma", 0.0);
    auto ref = reference_basis_pursuit(stored.instance, x, sigma);
    if (!ref.dual_certified) {
      std::cerr << "note: planted vector used as comparison point only "
                   "(no dual certificate)\n";
    }
    return ref.solution;
  }
  if (family == "toy_qp") return reference_toy_qp(stored.instance, 1e-11);
  if (family == "random_qp" || family.empty()) {
    return reference_quadratic(stored.instance);
  }
  fail(kExitIo, "no reference oracle for family '" + family + "'");
}

// ---------------------------------------------------------------- generate

int cmd_generate(const std::string& family, const std::string& out,
                 std::uint64_t seed, int rows, int cols, int sparsity,
                 double noise, int n1, int n2, int n3,
                 std::vector<int> dims, double diag_min, double diag_max) {
  nlohmann::json meta;
  meta["seed"] = seed;
  if (family == "bp") {
    BasisPursuitSpec spec{rows, cols, sparsity, noise, seed};
    BasisPursuitInstance bp = generate_basis_pursuit(spec);
    meta["family"] = "basis_pursuit";
    meta["params"] = {{"rows", rows},
                      {"cols", cols},
                      {"sparsity", sparsity},
                      {"noise_sigma", noise}};
    meta["suggested_gamma"] = bp.suggested_gamma;
    nlohmann::json planted;
    nlohmann::json xs = nlohmann::json::array();
    for (int i = 0; i < bp.ground_truth.size(); ++i) {
      xs.push_back(bp.ground_truth(i));
    }
    planted["x"] = std::move(xs);
    planted["noise_sigma"] = noise;
    planted["residual_norm"] = bp.noise.norm();
    meta["planted"] = std::move(planted);
    io::save_instance(out, bp.instance, meta);
    std::printf("basis pursuit instance: p=%d N=%d s=%d noise=%g\n", rows,
                cols, sparsity, noise);
    std::printf("suggested gamma (10/||b||_1): %.17g\n", bp.suggested_gamma);
  } else if (family == "toy-qp") {
    ProblemInstance toy = generate_toy_qp(ToyQpSpec{n1, n2, n3, seed});
    meta["family"] = "toy_qp";
    meta["params"] = {{"n1", n1}, {"n2", n2}, {"n3", n3}};
    io::save_instance(out, toy, meta);
    std::printf("toy QP instance: n1=%d n2=%d n3=%d\n", n1, n2, n3);
  } else if (family == "random-qp") {
    RandomQpSpec spec;
    spec.rows = rows;
    if (!dims.empty()) spec.dims = dims;
    spec.diag_min = diag_min;
    spec.diag_max = diag_max;
    spec.seed = seed;
    ProblemInstance qp = generate_random_qp(spec);
    meta["family"] = "random_qp";
    meta["params"] = {{"rows", spec.rows},
                      {"dims", spec.dims},
                      {"diag_min", diag_min},
                      {"diag_max", diag_max}};
    io::save_instance(out, qp, meta);
    std::printf("random QP instance: p=%d, %d blocks\n", spec.rows,
                qp.block_count());
  } else {
    fail(kExitIo, "unknown family '" + family + "'");
  }
  std::printf("wrote %s\n", out.c_str());
  return kExitOk;
}

// ----------------------------------------------------------------- certify

int cmd_certify(const std::string& instance_path, const std::string& gamma_arg,
                double rank_tol, const std::string& out) {
  io::StoredInstance stored = load_or_fail(instance_path);
  double gamma = 0.0;  // auto
  if (gamma_arg != "auto") gamma = std::stod(gamma_arg);

  theory::CertificateReport report;
  try {
    report = theory::certify(stored.instance, gamma, rank_tol);
  } catch (const std::invalid_argument& e) {
    fail(kExitNotCertifiable, e.what());
  }

  if (!out.empty()) {
    try {
      io::save_certificate(out, report);
    } catch (const io::IoError& e) {
      fail(kExitIo, e.what());
    }
  }

  if (report.certificates.empty()) {
    std::printf("scenario: none (no certificate applies)\n");
    return kExitNotCertifiable;
  }
  for (const auto& cert : report.certificates) {
    std::printf("%s: gamma_max=%.17g gamma=%.17g delta=%.17g%s\n",
                theory::to_string(cert.scenario).c_str(), cert.gamma_bound,
                cert.gamma, cert.delta,
                cert.certified ? "" : "  [not certified]");
    if (cert.scenario != theory::Scenario::scenario1) {
      std::printf("  delta3=%.17g delta4=%.17g delta5=%.17g\n",
                  cert.aux.delta3, cert.aux.delta4, cert.aux.delta5);
    }
  }
  if (std::isfinite(report.kappa)) {
    std::printf("kappa=%.17g (rank %d/%d%s)\n", report.kappa,
                report.rank_details.rank, report.rank_details.rows,
                report.rank_details.full_row_rank ? ", full row rank" : "");
  }
  if (!report.certified()) return kExitNotCertifiable;
  std::printf("selected: %s with delta=%.17g at gamma=%.17g\n",
              theory::to_string(report.scenario).c_str(), report.delta,
              report.gamma);
  return kExitOk;
}

// ------------------------------------------------------------------- solve

struct CheckOutcome {
  std::string name;
  bool passed;
  std::string detail;
};

int cmd_solve(const std::string& instance_path, const std::string& variant_arg,
              const std::string& gamma_arg, double alpha, double tau,
              int iters, double tol, const std::string& reference_arg,
              const std::vector<std::string>& checks, const std::string& out,
              std::vector<double> eps_list) {
  io::StoredInstance stored = load_or_fail(instance_path);
  const ProblemInstance& instance = stored.instance;
  const Variant variant = parse_variant(variant_arg);

  const bool wants_full_weight_bound =
      std::find(checks.begin(), checks.end(), "theorem2") != checks.end() ||
      std::find(checks.begin(), checks.end(), "theorem3") != checks.end() ||
      std::find(checks.begin(), checks.end(), "lemma3") != checks.end();

  double gamma;
  if (gamma_arg == "auto") {
    const ProblemInstance bound_instance =
        variant == Variant::slack_inequality ? slack_augmented(instance)
                                             : instance;
    const double bound = wants_full_weight_bound
                             ? theory::gamma_max_scenario23(bound_instance)
                             : theory::gamma_max_scenario1(bound_instance);
    if (!(bound > 0.0) || std::isinf(bound)) {
      fail(kExitNotCertifiable,
           "gamma=auto requires a finite certificate bound; pass --gamma");
    }
    gamma = 0.99 * bound;
    std::printf("gamma auto: %.17g (0.99 of the certificate bound)\n", gamma);
  } else {
    gamma = std::stod(gamma_arg);
  }

  SolverConfig config;
  config.variant = variant;
  config.gamma = gamma;
  config.max_iterations = iters;
  config.stop_tolerance = tol;
  if (variant == Variant::prox_jacobian) {
    config.alpha = alpha;
    config.prox_weights = default_prox_weights(instance, gamma, alpha, tau);
  }

  std::optional<ReferenceSolution> reference;
  if (reference_arg == "oracle") {
    reference = oracle_reference(stored);
  } else if (reference_arg != "none") {
    try {
      reference = io::load_reference(reference_arg);
    } catch (const io::IoError& e) {
      fail(kExitIo, e.what());
    }
  }

  const IterateState initial = variant == Variant::slack_inequality
                                   ? initial_slack_state(instance)
                                   : initial_state(instance);
  RunResult result;
  try {
    result = run(instance, initial, config,
                 reference ? &*reference : nullptr);
  } catch (const std::exception& e) {
    fail(kExitIo, std::string("solver failure: ") + e.what());
  }

  // Lyapunov column (needs a dual-certified reference and no slack block).
  const theory::LyapunovWeight weight = wants_full_weight_bound
                                            ? theory::LyapunovWeight::full_gamma
                                            : theory::LyapunovWeight::half_gamma;
  if (reference && reference->has_dual() &&
      variant != Variant::slack_inequality) {
    for (std::size_t k = 0; k < result.trace.size(); ++k) {
      result.trace[k].lyapunov =
          theory::lyapunov(instance, result.states[k + 1], *reference, gamma,
                           weight)
              .value;
    }
  }

  if (!out.empty()) {
    try {
      io::write_trace_csv(out, result.trace);
      std::printf("wrote %s\n", out.c_str());
    } catch (const io::IoError& e) {
      fail(kExitIo, e.what());
    }
  }

  std::printf("iterations run: %zu, final primal residual %.6g\n",
              result.trace.size(),
              result.trace.empty() ? 0.0
                                   : result.trace.back().primal_residual);
  if (reference) {
    std::sort(eps_list.rbegin(), eps_list.rend());
    const std::optional<double> initial_error =
        relative_error(result.states.front(), *reference);
    std::printf("iterations to reach relative error:\n");
    for (double eps : eps_list) {
      int reached = iters;  // budget reported when the tolerance is unmet
      if (initial_error && *initial_error <= eps) {
        reached = 0;
      } else {
        for (const TraceRecord& rec : result.trace) {
          if (rec.relative_error && *rec.relative_error <= eps) {
            reached = rec.iteration;
            break;
          }
        }
      }
      std::printf("  %.0e: %d%s\n", eps, reached,
                  reached == iters ? " (budget)" : "");
    }
  }

  // ------------------------------------------------------------- checks
  std::vector<CheckOutcome> outcomes;
  if (!checks.empty()) {
    if (variant != Variant::gauss_seidel) {
      fail(kExitIo, "--check applies to the gauss-seidel variant");
    }
    if (!reference || !reference->has_dual()) {
      fail(kExitIo, "--check needs a dual-certified reference");
    }
  }
  for (const std::string& name : checks) {
    CheckOutcome outcome{name, false, ""};
    char buf[160];
    if (name == "lemma1" || name == "lemma3") {
      const double kappa =
          name == "lemma3" ? theory::compute_kappa(instance).kappa : 0.0;
      int bad = 0;
      for (std::size_t k = 0; k + 1 < result.states.size(); ++k) {
        const auto check =
            name == "lemma1"
                ? theory::check_lemma1(instance, result.states[k],
                                       result.states[k + 1], *reference, gamma)
                : theory::check_lemma3(instance, result.states[k],
                                       result.states[k + 1], *reference, gamma,
                                       kappa);
        if (!check.holds) ++bad;
      }
      outcome.passed = bad == 0;
      std::snprintf(buf, sizeof(buf), "%d of %zu iterations violated", bad,
                    result.states.size() - 1);
      outcome.detail = buf;
    } else if (name == "theorem1" || name == "theorem2" || name == "theorem3") {
      const auto scenarios = theory::matching_scenarios(instance);
      const theory::Scenario want =
          name == "theorem1" ? theory::Scenario::scenario1
          : name == "theorem2" ? theory::Scenario::scenario2
                               : theory::Scenario::scenario3;
      if (std::find(scenarios.begin(), scenarios.end(), want) ==
          scenarios.end()) {
        outcome.detail = "scenario conditions not met";
      } else {
        double delta = 0.0;
        theory::LyapunovWeight w = theory::LyapunovWeight::half_gamma;
        if (name == "theorem1") {
          delta = theory::delta_scenario1(instance, gamma);
        } else {
          const double kappa = theory::compute_kappa(instance).kappa;
          w = theory::LyapunovWeight::full_gamma;
          delta = name == "theorem2"
                      ? theory::delta_scenario2(instance, gamma, kappa).delta2
                      : theory::delta_scenario3(instance, gamma, kappa).delta6;
        }
        if (delta <= 0.0) {
          outcome.detail = "gamma not below the certificate bound";
        } else {
          const auto report = theory::check_qlinear(instance, result.states,
                                                    *reference, gamma, w, delta);
          outcome.passed = report.all_hold;
          std::snprintf(buf, sizeof(buf), "delta=%.6g over %zu steps", delta,
                        report.steps.size());
          outcome.detail = buf;
        }
      }
    } else if (name == "rlinear") {
      const auto report =
          theory::check_rlinear(instance, result.states, *reference);
      bool ok = true;
      for (const auto& fit : report.fits) {
        if (!fit.valid || fit.ratio >= 1.0) ok = false;
      }
      if (report.xn_bound_checked && !report.xn_bound_holds) ok = false;
      outcome.passed = ok;
      outcome.detail = "geometric fits and the last-block bound";
    } else {
      fail(kExitIo, "unknown check '" + name + "'");
    }
    outcomes.push_back(outcome);
  }

  bool all_passed = true;
  for (const CheckOutcome& outcome : outcomes) {
    std::printf("[%s] %s: %s\n", outcome.passed ? "PASS" : "FAIL",
                outcome.name.c_str(), outcome.detail.c_str());
    all_passed = all_passed && outcome.passed;
  }
  return all_passed ? kExitOk : kExitCheckFailed;
}

// ----------------------------------------------------------------- compare

int cmd_compare(int rows, int cols, int sparsity, double noise,
                std::vector<std::uint64_t> seeds, int iters, double eps,
                const std::string& out) {
  if (seeds.empty()) fail(kExitIo, "need at least one seed");

  struct AlgoSummary {
    std::string name;
    std::vector<int> iterations;
    std::vector<std::vector<double>> errors;  // per seed, per iteration
  };
  std::vector<AlgoSummary> algos = {
      {"gs", {}, {}}, {"jacobian", {}, {}}, {"prox-jacobian", {}, {}}};

  for (std::uint64_t seed : seeds) {
    BasisPursuitInstance bp = generate_basis_pursuit(
        BasisPursuitSpec{rows, cols, sparsity, noise, seed});
    const auto ref =
        reference_basis_pursuit(bp.instance, bp.ground_truth, noise);
    const double gamma = bp.suggested_gamma;
    for (AlgoSummary& algo : algos) {
      SolverConfig config;
      config.gamma = gamma;
      config.max_iterations = iters;
      if (algo.name == "jacobian") {
        config.variant = Variant::jacobian;
      } else if (algo.name == "prox-jacobian") {
        config.variant = Variant::prox_jacobian;
        config.prox_weights =
            default_prox_weights(bp.instance, gamma, 1.0, 0.0);
      }
      const RunResult result =
          run(bp.instance, initial_state(bp.instance), config, &ref.solution);
      const std::optional<double> initial_error =
          relative_error(result.states.front(), ref.solution);
      int reached = initial_error && *initial_error <= eps ? 0 : iters;
      std::vector<double> errs;
      errs.reserve(result.trace.size());
      for (const TraceRecord& rec : result.trace) {
        errs.push_back(rec.relative_error.value_or(
            std::numeric_limits<double>::quiet_NaN()));
        if (reached == iters && rec.relative_error &&
            *rec.relative_error <= eps) {
          reached = rec.iteration;
        }
      }
      algo.iterations.push_back(reached);
      algo.errors.push_back(std::move(errs));
    }
  }

  std::printf("iterations to relative error %.0e (budget %d):\n", eps, iters);
  std::printf("%10s %6s %10s %14s\n", "seed", "gs", "jacobian",
              "prox-jacobian");
  int gs_beats_j = 0, gs_beats_pj = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    std::printf("%10llu %6d %10d %14d\n",
                static_cast<unsigned long long>(seeds[s]),
                algos[0].iterations[s], algos[1].iterations[s],
                algos[2].iterations[s]);
    if (algos[0].iterations[s] <= algos[1].iterations[s]) ++gs_beats_j;
    if (algos[0].iterations[s] <= algos[2].iterations[s]) ++gs_beats_pj;
  }
  std::printf("gs win-rate: %d/%zu vs jacobian, %d/%zu vs prox-jacobian\n",
              gs_beats_j, seeds.size(), gs_beats_pj, seeds.size());

  if (!out.empty()) {
    // geometric mean of relative errors across seeds, per iteration
    std::ofstream fout(out);
    if (!fout) fail(kExitIo, "cannot write " + out);
    fout << "iteration,gs,jacobian,prox_jacobian\n";
    for (int k = 0; k < iters; ++k) {
      fout << (k + 1);
      for (const AlgoSummary& algo : algos) {
        double log_sum = 0.0;
        int count = 0;
        for (const auto& errs : algo.errors) {
          if (k < static_cast<int>(errs.size()) && std::isfinite(errs[k]) &&
              errs[k] > 0.0) {
            log_sum += std::log(errs[k]);
            ++count;
          }
        }
        char buf[40];
        if (count == static_cast<int>(algo.errors.size())) {
          std::snprintf(buf, sizeof(buf), "%.17g",
                        std::exp(log_sum / count));
          fout << ',' << buf;
        } else {
          fout << ',';
        }
      }
      fout << '\n';
    }
    std::printf("wrote %s\n", out.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multi-block ADMM solvers with linear-convergence certificates"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate an experiment instance");
  std::string gen_family = "bp";
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  int gen_rows = 300, gen_cols = 1000, gen_sparsity = 60;
  double gen_noise = 0.0;
  int gen_n1 = 20, gen_n2 = 50, gen_n3 = 20;
  std::vector<int> gen_dims;
  double gen_diag_min = 0.5, gen_diag_max = 1.5;
  gen->add_option("--family", gen_family, "bp | toy-qp | random-qp")
      ->required();
  gen->add_option("--out", gen_out, "output instance file")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--rows,-p", gen_rows, "rows (bp, random-qp)");
  gen->add_option("--cols,-n", gen_cols, "columns / scalar blocks (bp)");
  gen->add_option("--sparsity,-s", gen_sparsity, "planted nonzeros (bp)");
  gen->add_option("--noise", gen_noise, "noise sigma (bp)");
  gen->add_option("--n1", gen_n1, "toy-qp block-1 dimension");
  gen->add_option("--n2", gen_n2, "toy-qp block-2 dimension");
  gen->add_option("--n3", gen_n3, "toy-qp block-3 dimension");
  gen->add_option("--dims", gen_dims, "block dimensions (random-qp)")
      ->delimiter(',');
  gen->add_option("--diag-min", gen_diag_min, "hessian diagonal lower bound");
  gen->add_option("--diag-max", gen_diag_max, "hessian diagonal upper bound");

  // certify
  auto* cert = app.add_subcommand(
      "certify", "Compute the linear-convergence certificate");
  std::string cert_instance, cert_gamma = "auto", cert_out;
  double cert_rank_tol = -1.0;
  cert->add_option("--instance", cert_instance, "instance file")->required();
  cert->add_option("--gamma", cert_gamma,
                   "penalty (auto = 0.99 x certificate bound)");
  cert->add_option("--rank-tol", cert_rank_tol,
                   "relative singular-value threshold for rank decisions");
  cert->add_option("--out", cert_out, "certificate report file");

  // solve
  auto* solve = app.add_subcommand("solve", "Run one solver variant");
  std::string solve_instance, solve_variant = "gs", solve_gamma = "auto";
  std::string solve_reference = "none", solve_out;
  double solve_alpha = 1.0, solve_tau = 0.0, solve_tol = 0.0;
  int solve_iters = 200;
  std::vector<std::string> solve_checks;
  std::vector<double> solve_eps = {1e-2, 1e-3, 1e-4, 1e-6};
  solve->add_option("--instance", solve_instance, "instance file")->required();
  solve->add_option("--variant", solve_variant,
                    "gs | jacobian | prox-jacobian | slack");
  solve->add_option("--gamma", solve_gamma,
                    "penalty (auto = 0.99 x certificate bound)");
  solve->add_option("--alpha", solve_alpha, "dual step factor (prox-jacobian)");
  solve->add_option("--tau", solve_tau,
                    "prox weight scale; <=0 picks the guaranteed default");
  solve->add_option("--iters", solve_iters, "iteration budget");
  solve->add_option("--tol", solve_tol, "early-stop residual tolerance");
  solve->add_option("--reference", solve_reference,
                    "oracle | none | reference file path");
  solve->add_option("--check", solve_checks,
                    "lemma1 | lemma3 | theorem1 | theorem2 | theorem3 | rlinear")
      ->delimiter(',');
  solve->add_option("--out", solve_out, "trace csv path");
  solve->add_option("--eps", solve_eps, "tolerances for the summary")
      ->delimiter(',');

  // compare
  auto* cmp = app.add_subcommand(
      "compare", "Race gs/jacobian/prox-jacobian on basis pursuit");
  int cmp_rows = 300, cmp_cols = 1000, cmp_sparsity = 60, cmp_iters = 200;
  double cmp_noise = 0.0, cmp_eps = 1e-4;
  std::vector<std::uint64_t> cmp_seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string cmp_out;
  cmp->add_option("--rows,-p", cmp_rows, "rows");
  cmp->add_option("--cols,-n", cmp_cols, "columns / scalar blocks");
  cmp->add_option("--sparsity,-s", cmp_sparsity, "planted nonzeros");
  cmp->add_option("--noise", cmp_noise, "noise sigma");
  cmp->add_option("--seeds", cmp_seeds, "seed list")->delimiter(',');
  cmp->add_option("--iters", cmp_iters, "iteration budget");
  cmp->add_option("--eps", cmp_eps, "target relative error");
  cmp->add_option("--out", cmp_out, "geometric-mean error curves csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_generate(gen_family, gen_out, gen_seed, gen_rows, gen_cols,
                          gen_sparsity, gen_noise, gen_n1, gen_n2, gen_n3,
                          gen_dims, gen_diag_min, gen_diag_max);
    }
    if (cert->parsed()) {
      return cmd_certify(cert_instance, cert_gamma, cert_rank_tol, cert_out);
    }
    if (solve->parsed()) {
      return cmd_solve(solve_instance, solve_variant, solve_gamma, solve_alpha,
                       solve_tau, solve_iters, solve_tol, solve_reference,
                       solve_checks, solve_out, solve_eps);
    }
    if (cmp->parsed()) {
      return cmd_compare(cmp_rows, cmp_cols, cmp_sparsity, cmp_noise,
                         cmp_seeds, cmp_iters, cmp_eps, cmp_out);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

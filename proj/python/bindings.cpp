#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "admmcert/problems.hpp"
#include "admmcert/solvers.hpp"
#include "admmcert/theory.hpp"

namespace py = pybind11;
using namespace admmcert;

namespace {

Variant variant_from_name(const std::string& name) {
  if (name == "gs" || name == "gauss-seidel" || name == "gauss_seidel") {
    return Variant::gauss_seidel;
  }
  if (name == "jacobian") return Variant::jacobian;
  if (name == "prox-jacobian" || name == "prox_jacobian") {
    return Variant::prox_jacobian;
  }
  if (name == "slack" || name == "slack_inequality") {
    return Variant::slack_inequality;
  }
  throw std::invalid_argument("unknown variant '" + name + "'");
}

SolverConfig make_config(const ProblemInstance& instance,
                         const std::string& variant, double gamma, int iters,
                         double alpha, double tau, double stop_tol) {
  SolverConfig config;
  config.variant = variant_from_name(variant);
  config.gamma = gamma;
  config.max_iterations = iters;
  config.stop_tolerance = stop_tol;
  if (config.variant == Variant::prox_jacobian) {
    config.alpha = alpha;
    if (tau <= 0.0) {
      tau = 1.01 * gamma * (instance.block_count() / (2.0 - alpha) - 1.0);
    }
    std::vector<Matrix> weights;
    for (const BlockSpec& b : instance.blocks()) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(
          Matrix(b.coupling.transpose() * b.coupling), Eigen::EigenvaluesOnly);
      weights.push_back(tau * es.eigenvalues().maxCoeff() *
                        Matrix::Identity(b.cols(), b.cols()));
    }
    config.prox_weights = std::move(weights);
  }
  return config;
}

theory::LyapunovWeight weight_from_name(const std::string& name) {
  if (name == "half_gamma") return theory::LyapunovWeight::half_gamma;
  if (name == "full_gamma") return theory::LyapunovWeight::full_gamma;
  throw std::invalid_argument("weight must be half_gamma or full_gamma");
}

py::dict certificate_dict(const theory::CertificateReport& report) {
  py::dict out;
  out["scenario"] = theory::to_string(report.scenario);
  out["certified"] = report.certified();
  out["gamma_max"] = report.gamma_max;
  out["gamma"] = report.gamma;
  out["delta"] = report.delta;
  out["kappa"] = report.kappa;
  py::list scenarios;
  for (const auto& cert : report.certificates) {
    py::dict c;
    c["scenario"] = theory::to_string(cert.scenario);
    c["gamma_bound"] = cert.gamma_bound;
    c["gamma"] = cert.gamma;
    c["delta"] = cert.delta;
    c["certified"] = cert.certified;
    c["delta3"] = cert.aux.delta3;
    c["delta4"] = cert.aux.delta4;
    c["delta5"] = cert.aux.delta5;
    scenarios.append(std::move(c));
  }
  out["scenarios"] = std::move(scenarios);
  return out;
}

}  // namespace

PYBIND11_MODULE(admmcert, m) {
  m.doc() = "Multi-block ADMM solvers with linear-convergence certificates";

  py::register_exception<OracleError>(m, "OracleError");

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_property_readonly("block_count", &ProblemInstance::block_count)
      .def_property_readonly("rows", &ProblemInstance::rows)
      .def_property_readonly("rhs", &ProblemInstance::rhs)
      .def("coupling",
           [](const ProblemInstance& self, int i) {
             return self.block(i).coupling;
           })
      .def("sigma",
           [](const ProblemInstance& self, int i) {
             return self.block(i).sigma;
           })
      .def("stacked_coupling", &ProblemInstance::stacked_coupling);

  py::class_<ReferenceSolution>(m, "ReferenceSolution")
      .def_readonly("primal", &ReferenceSolution::primal_star)
      .def_readonly("dual", &ReferenceSolution::dual_star)
      .def_readonly("kkt_residual", &ReferenceSolution::kkt_residual)
      .def_property_readonly("has_dual", &ReferenceSolution::has_dual);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("iterations",
                             [](const RunResult& self) {
                               return self.trace.size();
                             })
      .def_property_readonly(
          "primal_residuals",
          [](const RunResult& self) {
            Vector v(self.trace.size());
            for (std::size_t k = 0; k < self.trace.size(); ++k) {
              v(k) = self.trace[k].primal_residual;
            }
            return v;
          })
      .def_property_readonly(
          "dual_changes",
          [](const RunResult& self) {
            Vector v(self.trace.size());
            for (std::size_t k = 0; k < self.trace.size(); ++k) {
              v(k) = self.trace[k].dual_change;
            }
            return v;
          })
      .def_property_readonly(
          "relative_errors",
          [](const RunResult& self) {
            Vector v(self.trace.size());
            for (std::size_t k = 0; k < self.trace.size(); ++k) {
              v(k) = self.trace[k].relative_error.value_or(
                  std::numeric_limits<double>::quiet_NaN());
            }
            return v;
          })
      .def_property_readonly("final_primal",
                             [](const RunResult& self) {
                               return self.final_state().primal;
                             })
      .def_property_readonly("final_dual", [](const RunResult& self) {
        return self.final_state().dual;
      });

  m.def(
      "generate_basis_pursuit",
      [](int rows, int cols, int sparsity, double noise_sigma,
         std::uint64_t seed) {
        BasisPursuitInstance bp = generate_basis_pursuit(
            BasisPursuitSpec{rows, cols, sparsity, noise_sigma, seed});
        return py::make_tuple(bp.instance, bp.ground_truth,
                              bp.suggested_gamma);
      },
      py::arg("rows"), py::arg("cols"), py::arg("sparsity"),
      py::arg("noise_sigma") = 0.0, py::arg("seed") = 0,
      "Returns (instance, planted_x, suggested_gamma).");

  m.def(
      "generate_toy_qp",
      [](int n1, int n2, int n3, std::uint64_t seed) {
        return generate_toy_qp(ToyQpSpec{n1, n2, n3, seed});
      },
      py::arg("n1") = 20, py::arg("n2") = 50, py::arg("n3") = 20,
      py::arg("seed") = 0);

  m.def(
      "generate_random_qp",
      [](int rows, std::vector<int> dims, double diag_min, double diag_max,
         std::uint64_t seed) {
        RandomQpSpec spec;
        spec.rows = rows;
        spec.dims = std::move(dims);
        spec.diag_min = diag_min;
        spec.diag_max = diag_max;
        spec.seed = seed;
        return generate_random_qp(spec);
      },
      py::arg("rows"), py::arg("dims"), py::arg("diag_min") = 0.5,
      py::arg("diag_max") = 1.5, py::arg("seed") = 0);

  m.def("reference_toy_qp", &reference_toy_qp, py::arg("instance"),
        py::arg("tol") = 1e-10, py::arg("max_iterations") = 1000000);
  m.def("reference_quadratic", &reference_quadratic, py::arg("instance"));
  m.def(
      "reference_basis_pursuit",
      [](const ProblemInstance& instance, const Vector& ground_truth,
         double noise_sigma) {
        auto ref = reference_basis_pursuit(instance, ground_truth,
                                           noise_sigma);
        return py::make_tuple(ref.solution, ref.dual_certified);
      },
      py::arg("instance"), py::arg("ground_truth"),
      py::arg("noise_sigma") = 0.0,
      "Returns (reference, dual_certified).");

  m.def(
      "run",
      [](const ProblemInstance& instance, const std::string& variant,
         double gamma, int iters, double alpha, double tau, double stop_tol,
         const ReferenceSolution* reference) {
        const SolverConfig config = make_config(instance, variant, gamma,
                                                iters, alpha, tau, stop_tol);
        const IterateState initial =
            config.variant == Variant::slack_inequality
                ? initial_slack_state(instance)
                : initial_state(instance);
        return run(instance, initial, config, reference);
      },
      py::arg("instance"), py::arg("variant"), py::arg("gamma"),
      py::arg("iters"), py::arg("alpha") = 1.0, py::arg("tau") = 0.0,
      py::arg("stop_tol") = 0.0, py::arg("reference") = nullptr,
      py::keep_alive<0, 1>());

  m.def(
      "certify",
      [](const ProblemInstance& instance, double gamma, double rank_tol) {
        return certificate_dict(theory::certify(instance, gamma, rank_tol));
      },
      py::arg("instance"), py::arg("gamma") = 0.0, py::arg("rank_tol") = -1.0);

  m.def("gamma_max_scenario1", &theory::gamma_max_scenario1);
  m.def("gamma_max_scenario23", &theory::gamma_max_scenario23);
  m.def("delta_scenario1", &theory::delta_scenario1, py::arg("instance"),
        py::arg("gamma"));
  m.def(
      "compute_kappa",
      [](const ProblemInstance& instance, double rank_tol) {
        const theory::KappaResult k = theory::compute_kappa(instance, rank_tol);
        py::dict out;
        out["kappa"] = k.kappa;
        out["rank"] = k.details.rank;
        out["full_row_rank"] = k.details.full_row_rank;
        out["ambiguous"] = k.details.ambiguous;
        return out;
      },
      py::arg("instance"), py::arg("rank_tol") = -1.0);

  m.def(
      "lyapunov_trace",
      [](const ProblemInstance& instance, const RunResult& result,
         const ReferenceSolution& reference, double gamma,
         const std::string& weight) {
        const auto w = weight_from_name(weight);
        Vector v(result.states.size());
        for (std::size_t k = 0; k < result.states.size(); ++k) {
          v(k) = theory::lyapunov(instance, result.states[k], reference,
                                  gamma, w)
                     .value;
        }
        return v;
      },
      py::arg("instance"), py::arg("result"), py::arg("reference"),
      py::arg("gamma"), py::arg("weight") = "half_gamma");

  m.def(
      "check_lemma1",
      [](const ProblemInstance& instance, const RunResult& result,
         const ReferenceSolution& reference, double gamma) {
        for (std::size_t k = 0; k + 1 < result.states.size(); ++k) {
          if (!theory::check_lemma1(instance, result.states[k],
                                    result.states[k + 1], reference, gamma)
                   .holds) {
            return false;
          }
        }
        return true;
      },
      py::arg("instance"), py::arg("result"), py::arg("reference"),
      py::arg("gamma"));

  m.def(
      "check_qlinear",
      [](const ProblemInstance& instance, const RunResult& result,
         const ReferenceSolution& reference, double gamma,
         const std::string& weight, double delta) {
        const auto report =
            theory::check_qlinear(instance, result.states, reference, gamma,
                                  weight_from_name(weight), delta);
        Vector factors(report.steps.size());
        for (std::size_t k = 0; k < report.steps.size(); ++k) {
          factors(k) = report.steps[k].factor;
        }
        return py::make_tuple(report.all_hold, factors);
      },
      py::arg("instance"), py::arg("result"), py::arg("reference"),
      py::arg("gamma"), py::arg("weight"), py::arg("delta"),
      "Returns (all_hold, per-step contraction factors).");
}

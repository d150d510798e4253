#include "admmcert/theory.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace admmcert::theory {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAbsFloor = 1e-12;

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

double default_rank_tol(const ProblemInstance& instance) {
  return std::max(instance.rows(), instance.total_cols()) *
         std::numeric_limits<double>::epsilon();
}

double lambda_max_sym(const Matrix& m) {
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double lambda_min_sym(const Matrix& m) {
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// lambda_max(A' A) = squared spectral norm of the coupling.
double coupling_lmax(const BlockSpec& b) {
  if (b.cols() == 1) return b.coupling.squaredNorm();
  return lambda_max_sym(Matrix(b.coupling.transpose() * b.coupling));
}

int numerical_rank(const Matrix& m, double rank_tol, double* threshold_out,
                   bool* ambiguous_out) {
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double threshold = rank_tol * smax;
  int rank = 0;
  bool ambiguous = false;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
    if (threshold > 0.0 && sv(i) > threshold / 10.0 &&
        sv(i) < threshold * 10.0) {
      ambiguous = true;
    }
  }
  if (threshold_out != nullptr) *threshold_out = threshold;
  if (ambiguous_out != nullptr) *ambiguous_out = ambiguous;
  return rank;
}

bool full_row_rank(const Matrix& m, double rank_tol) {
  if (m.rows() > m.cols()) return false;
  return numerical_rank(m, rank_tol, nullptr, nullptr) == m.rows();
}

bool full_column_rank(const Matrix& m, double rank_tol) {
  if (m.cols() > m.rows()) return false;
  return numerical_rank(m, rank_tol, nullptr, nullptr) == m.cols();
}

bool strongly_convex_tail(const ProblemInstance& instance) {
  for (int i = 1; i < instance.block_count(); ++i) {
    if (!(instance.block(i).sigma > 0.0)) return false;
  }
  return true;
}

bool all_lipschitz(const ProblemInstance& instance) {
  for (const BlockSpec& b : instance.blocks()) {
    if (std::isinf(b.lipschitz)) return false;
  }
  return true;
}

bool any_constrained(const ProblemInstance& instance) {
  for (const BlockSpec& b : instance.blocks()) {
    if (b.constrained) return true;
  }
  return false;
}

// Suffix coupling errors s_i = sum_{j=i+1}^{N} A_j (x_j - x_j*), i = 1..N-1,
// returned as their squared norms (1-indexed position i-1).
std::vector<double> suffix_error_sq(const ProblemInstance& instance,
                                    const std::vector<Vector>& primal,
                                    const std::vector<Vector>& primal_star) {
  const int n = instance.block_count();
  std::vector<double> out(std::max(n - 1, 0));
  Vector acc = Vector::Zero(instance.rows());
  for (int j = n - 1; j >= 1; --j) {
    acc += instance.block(j).coupling * (primal[j] - primal_star[j]);
    out[j - 1] = acc.squaredNorm();
  }
  return out;
}

void validate_reference(const ProblemInstance& instance,
                        const ReferenceSolution& reference) {
  require(static_cast<int>(reference.primal_star.size()) ==
              instance.block_count(),
          "reference block count mismatch");
  require(reference.dual_star.size() == instance.rows(),
          "reference needs a dual vector");
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::scenario1: return "scenario1";
    case Scenario::scenario2: return "scenario2";
    case Scenario::scenario3: return "scenario3";
    case Scenario::none: return "none";
  }
  return "none";
}

std::vector<Scenario> matching_scenarios(const ProblemInstance& instance,
                                         double rank_tol) {
  if (rank_tol < 0.0) rank_tol = default_rank_tol(instance);
  std::vector<Scenario> out;
  const int n = instance.block_count();
  if (n < 2) return out;
  const BlockSpec& first = instance.block(0);
  const BlockSpec& last = instance.block(n - 1);

  const bool tail_strong = strongly_convex_tail(instance);
  const bool all_smooth = all_lipschitz(instance);
  const bool unconstrained = !any_constrained(instance);

  if (tail_strong && !std::isinf(last.lipschitz) && !last.constrained &&
      full_row_rank(last.coupling, rank_tol)) {
    out.push_back(Scenario::scenario1);
  }
  if (first.sigma > 0.0 && tail_strong && all_smooth && unconstrained) {
    out.push_back(Scenario::scenario2);
  }
  if (tail_strong && all_smooth && unconstrained &&
      full_column_rank(first.coupling, rank_tol)) {
    out.push_back(Scenario::scenario3);
  }
  return out;
}

Scenario classify_scenario(const ProblemInstance& instance, double rank_tol) {
  return certify(instance, 0.0, rank_tol).scenario;
}

KappaResult compute_kappa(const ProblemInstance& instance, double rank_tol) {
  if (rank_tol < 0.0) rank_tol = default_rank_tol(instance);
  const Matrix m = instance.stacked_coupling();
  if (m.norm() == 0.0) {
    throw std::invalid_argument("compute_kappa: stacked coupling is zero");
  }
  const int p = instance.rows();

  KappaResult result;
  result.details.rows = p;
  result.details.rank = numerical_rank(m, rank_tol,
                                       &result.details.singular_threshold,
                                       &result.details.ambiguous);
  const int r = result.details.rank;

  if (r == p) {
    result.details.full_row_rank = true;
    result.kappa = 1.0 / lambda_min_sym(Matrix(m * m.transpose()));
    return result;
  }

  // Pick r well-conditioned rows via a pivoted orthogonal factorization of
  // M' (its column pivots are row indices of M).
  Eigen::ColPivHouseholderQR<Matrix> qr(m.transpose());
  const auto perm = qr.colsPermutation().indices();
  std::vector<int> selected(perm.data(), perm.data() + r);
  result.details.selected_rows = selected;

  std::vector<char> in_basis(p, 0);
  for (int idx : selected) in_basis[idx] = 1;

  Matrix m_r(r, m.cols());
  for (int i = 0; i < r; ++i) m_r.row(i) = m.row(selected[i]);
  Matrix m_rest(p - r, m.cols());
  int k = 0;
  for (int i = 0; i < p; ++i) {
    if (!in_basis[i]) m_rest.row(k++) = m.row(i);
  }

  // M (after the permutation) = [I; B] M_r  =>  B M_r = M_rest.
  const Matrix gram = m_r * m_r.transpose();
  const Matrix b_t = Eigen::LDLT<Matrix>(gram).solve(m_r * m_rest.transpose());
  const Matrix b = b_t.transpose();

  Matrix ibb = b.transpose() * b;
  ibb.diagonal().array() += 1.0;
  const Matrix e = ibb * m_r;
  result.kappa = lambda_max_sym(ibb) / lambda_min_sym(Matrix(e * e.transpose()));
  return result;
}

double gamma_max_scenario1(const ProblemInstance& instance) {
  const int n = instance.block_count();
  require(n >= 2, "certificates need at least two blocks");
  double bound = kInf;
  for (int i = 2; i <= n - 1; ++i) {
    const BlockSpec& b = instance.block(i - 1);
    const double denom =
        (2.0 * n - i) * (i - 1.0) * coupling_lmax(b);
    bound = std::min(bound, denom > 0.0 ? 4.0 * b.sigma / denom : kInf);
  }
  const BlockSpec& last = instance.block(n - 1);
  const double denom_n =
      (n + 1.0) * (n - 2.0) * coupling_lmax(last);
  bound = std::min(bound, denom_n > 0.0 ? 4.0 * last.sigma / denom_n : kInf);
  return bound;
}

double gamma_max_scenario23(const ProblemInstance& instance) {
  const int n = instance.block_count();
  require(n >= 2, "certificates need at least two blocks");
  double bound = kInf;
  for (int i = 2; i <= n - 1; ++i) {
    const BlockSpec& b = instance.block(i - 1);
    const double denom =
        3.0 * (2.0 * n - i) * (i - 1.0) * coupling_lmax(b);
    bound = std::min(bound, denom > 0.0 ? 4.0 * b.sigma / denom : kInf);
  }
  const BlockSpec& last = instance.block(n - 1);
  const double denom_n =
      (3.0 * n * n - 3.0 * n - 2.0) * coupling_lmax(last);
  bound = std::min(bound, denom_n > 0.0 ? 4.0 * last.sigma / denom_n : kInf);
  return bound;
}

double delta_scenario1(const ProblemInstance& instance, double gamma) {
  require(gamma > 0.0, "gamma must be positive");
  const int n = instance.block_count();
  require(n >= 2, "certificates need at least two blocks");
  double delta = kInf;
  for (int i = 2; i <= n - 1; ++i) {
    const BlockSpec& b = instance.block(i - 1);
    const double factor = (2.0 * n - i) * (i - 1.0) * coupling_lmax(b);
    if (factor <= 0.0) continue;
    delta = std::min(delta, (4.0 * b.sigma - gamma * factor) / (gamma * factor));
  }
  const BlockSpec& last = instance.block(n - 1);
  const double lmax_n = coupling_lmax(last);
  const double lmin_rows =
      lambda_min_sym(Matrix(last.coupling * last.coupling.transpose()));
  const double num =
      4.0 * gamma * last.sigma -
      gamma * gamma * (n + 1.0) * (n - 2.0) * lmax_n;
  const double den = 2.0 / lmin_rows * last.lipschitz * last.lipschitz +
                     gamma * gamma * n * (n - 1.0) * lmax_n;
  delta = std::min(delta, num / den);
  return delta;
}

namespace {

DeltaAux delta_aux(const ProblemInstance& instance, double gamma,
                   double kappa) {
  const int n = instance.block_count();
  DeltaAux aux;
  aux.delta3 = kInf;
  for (int i = 2; i <= n - 1; ++i) {
    const BlockSpec& b = instance.block(i - 1);
    const double factor = (2.0 * n - i) * (i - 1.0) * coupling_lmax(b);
    const double num = 4.0 * b.sigma * gamma - 3.0 * gamma * gamma * factor;
    const double den =
        2.0 * gamma * gamma * factor + 4.0 * kappa * b.lipschitz * b.lipschitz;
    aux.delta3 = std::min(aux.delta3, num / den);
  }
  aux.delta4 = kInf;
  for (int i = 1; i <= n - 1; ++i) {
    aux.delta4 = std::min(
        aux.delta4,
        1.0 / (4.0 * kappa * coupling_lmax(instance.block(i - 1))));
  }
  const BlockSpec& last = instance.block(n - 1);
  const double lmax_n = coupling_lmax(last);
  const double num5 = 4.0 * last.sigma * gamma -
                      (3.0 * n * n - 3.0 * n - 2.0) * gamma * gamma * lmax_n;
  const double den5 = 2.0 * gamma * gamma * n * (n - 1.0) * lmax_n +
                      4.0 * kappa * last.lipschitz * last.lipschitz;
  aux.delta5 = num5 / den5;
  return aux;
}

}  // namespace

Delta2Result delta_scenario2(const ProblemInstance& instance, double gamma,
                             double kappa) {
  require(gamma > 0.0, "gamma must be positive");
  require(kappa > 0.0, "kappa must be positive");
  Delta2Result result;
  result.aux = delta_aux(instance, gamma, kappa);
  const BlockSpec& first = instance.block(0);
  const double head =
      first.sigma * gamma / (kappa * first.lipschitz * first.lipschitz);
  result.delta2 = std::min({head, result.aux.delta3, result.aux.delta4,
                            result.aux.delta5});
  return result;
}

Delta3Result delta_scenario3(const ProblemInstance& instance, double gamma,
                             double kappa) {
  require(gamma > 0.0, "gamma must be positive");
  require(kappa > 0.0, "kappa must be positive");
  Delta3Result result;
  result.aux = delta_aux(instance, gamma, kappa);
  const int n = instance.block_count();
  const BlockSpec& first = instance.block(0);
  const double lmax_1 = coupling_lmax(first);
  const double lmin_1 =
      lambda_min_sym(Matrix(first.coupling.transpose() * first.coupling));
  const double head =
      gamma * gamma /
      (4.0 * kappa * gamma * gamma * (n - 1.0) * lmax_1 +
       4.0 * kappa * first.lipschitz * first.lipschitz / lmin_1);
  result.delta6 = std::min({head, result.aux.delta3, result.aux.delta4,
                            result.aux.delta5});
  return result;
}

LyapunovValue lyapunov(const ProblemInstance& instance,
                       const IterateState& state,
                       const ReferenceSolution& reference, double gamma,
                       LyapunovWeight weight) {
  require(gamma > 0.0, "gamma must be positive");
  validate_reference(instance, reference);
  const std::vector<double> suffix =
      suffix_error_sq(instance, state.primal, reference.primal_star);
  double primal_part = 0.0;
  for (double v : suffix) primal_part += v;

  LyapunovValue out;
  out.weight = weight;
  out.weight_coefficient =
      weight == LyapunovWeight::half_gamma ? gamma / 2.0 : gamma;
  out.value = out.weight_coefficient * primal_part +
              (reference.dual_star - state.dual).squaredNorm() / (2.0 * gamma);
  return out;
}

InequalityCheck check_lemma1(const ProblemInstance& instance,
                             const IterateState& state_k,
                             const IterateState& state_k1,
                             const ReferenceSolution& reference, double gamma,
                             double rel_tol) {
  validate_reference(instance, reference);
  const int n = instance.block_count();
  const double phi_k =
      lyapunov(instance, state_k, reference, gamma, LyapunovWeight::half_gamma)
          .value;
  const double phi_k1 = lyapunov(instance, state_k1, reference, gamma,
                                 LyapunovWeight::half_gamma)
                            .value;

  double rhs = 0.0;
  double scale = std::max(phi_k, phi_k1);
  for (int i = 1; i <= n; ++i) {
    const BlockSpec& b = instance.block(i - 1);
    const double factor = i < n ? (2.0 * n - i) * (i - 1.0)
                                : (n + 1.0) * (n - 2.0);
    const double coeff =
        b.sigma - gamma * factor / 4.0 * coupling_lmax(b);
    const double err =
        (state_k1.primal[i - 1] - reference.primal_star[i - 1]).squaredNorm();
    rhs += coeff * err;
    scale = std::max(scale, std::abs(coeff) * err);
  }
  // Coupling residual of the first fresh block against the stale tail.
  Vector res = instance.block(0).coupling * state_k1.primal[0] -
               instance.rhs();
  for (int j = 1; j < n; ++j) {
    res += instance.block(j).coupling * state_k.primal[j];
  }
  const double res_term = gamma / 2.0 * res.squaredNorm();
  rhs += res_term;
  scale = std::max(scale, res_term);

  InequalityCheck check;
  check.slack = (phi_k - phi_k1) - rhs;
  check.scale = scale;
  check.holds = check.slack >= -std::max(rel_tol * scale, kAbsFloor);
  return check;
}

InequalityCheck check_lemma3(const ProblemInstance& instance,
                             const IterateState& state_k,
                             const IterateState& state_k1,
                             const ReferenceSolution& reference, double gamma,
                             double kappa, double rel_tol) {
  validate_reference(instance, reference);
  require(gamma > 0.0, "gamma must be positive");
  require(kappa > 0.0, "kappa must be positive");
  const int n = instance.block_count();

  const double lhs = (state_k1.dual - reference.dual_star).squaredNorm();
  double rhs = 0.0;
  double scale = lhs;
  for (int i = 0; i < n; ++i) {
    const BlockSpec& b = instance.block(i);
    const double term =
        2.0 * kappa * b.lipschitz * b.lipschitz *
        (state_k1.primal[i] - reference.primal_star[i]).squaredNorm();
    rhs += term;
    scale = std::max(scale, term);
  }
  const std::vector<double> suffix_k =
      suffix_error_sq(instance, state_k.primal, reference.primal_star);
  const std::vector<double> suffix_k1 =
      suffix_error_sq(instance, state_k1.primal, reference.primal_star);
  for (int i = 1; i <= n - 1; ++i) {
    const double term = 4.0 * kappa * gamma * gamma *
                        coupling_lmax(instance.block(i - 1)) *
                        (suffix_k[i - 1] + suffix_k1[i - 1]);
    rhs += term;
    scale = std::max(scale, term);
  }

  InequalityCheck check;
  check.slack = rhs - lhs;
  check.scale = scale;
  check.holds = check.slack >= -std::max(rel_tol * scale, kAbsFloor);
  return check;
}

QLinearReport check_qlinear(const ProblemInstance& instance,
                            std::span<const IterateState> states,
                            const ReferenceSolution& reference, double gamma,
                            LyapunovWeight weight, double delta,
                            double rel_tol) {
  validate_reference(instance, reference);
  require(states.size() >= 2, "need at least two states");
  QLinearReport report;
  report.all_hold = true;
  report.steps.reserve(states.size() - 1);

  double phi_prev =
      lyapunov(instance, states[0], reference, gamma, weight).value;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const double phi =
        lyapunov(instance, states[k], reference, gamma, weight).value;
    QLinearStep step;
    step.iteration = states[k - 1].iteration;
    step.slack = phi_prev - (1.0 + delta) * phi;
    const double scale = std::max(phi_prev, phi);
    step.holds = step.slack >= -std::max(rel_tol * scale, kAbsFloor);
    step.factor = phi_prev > 0.0
                      ? phi / phi_prev
                      : (phi == 0.0 ? 0.0 : kInf);
    report.all_hold = report.all_hold && step.holds;
    report.steps.push_back(step);
    phi_prev = phi;
  }
  return report;
}

namespace {

GeometricFit fit_geometric(const std::string& name,
                           const std::vector<double>& series) {
  GeometricFit fit;
  fit.quantity = name;
  double max_v = 0.0;
  for (double v : series) max_v = std::max(max_v, v);
  if (max_v == 0.0 || series.size() < 3) return fit;  // indeterminate

  const double floor = 1e-15 * max_v;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k] <= floor) continue;
    const double x = static_cast<double>(k);
    const double y = std::log10(series[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 3) return fit;
  const double det = count * sxx - sx * sx;
  if (det == 0.0) return fit;
  const double slope = (count * sxy - sx * sy) / det;
  fit.valid = true;
  fit.ratio = std::pow(10.0, slope);
  fit.log10_start = (sy * sxx - sx * sxy) / det;
  return fit;
}

}  // namespace

RLinearReport check_rlinear(const ProblemInstance& instance,
                            std::span<const IterateState> states,
                            const ReferenceSolution& reference,
                            double rel_tol) {
  validate_reference(instance, reference);
  require(states.size() >= 2, "need at least two states");
  const int n = instance.block_count();
  const std::size_t len = states.size();

  RLinearReport report;
  std::vector<double> series(len);

  for (std::size_t k = 0; k < len; ++k) {
    series[k] = (states[k].dual - reference.dual_star).norm();
  }
  report.fits.push_back(fit_geometric("dual_error", series));

  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < len; ++k) {
      series[k] = (instance.block(i).coupling *
                   (states[k].primal[i] - reference.primal_star[i]))
                      .norm();
    }
    report.fits.push_back(
        fit_geometric("coupled_error_" + std::to_string(i + 1), series));
  }

  for (std::size_t k = 0; k < len; ++k) {
    series[k] =
        (states[k].primal[n - 1] - reference.primal_star[n - 1]).norm();
  }
  report.fits.push_back(fit_geometric("last_block_error", series));

  const BlockSpec& last = instance.block(n - 1);
  if (last.sigma > 0.0) {
    report.xn_bound_checked = true;
    report.xn_bound_holds = true;
    const double ratio = std::sqrt(coupling_lmax(last)) / last.sigma;
    for (std::size_t k = 1; k < len; ++k) {
      const double lhs =
          (states[k].primal[n - 1] - reference.primal_star[n - 1]).norm();
      const double rhs =
          ratio * (states[k].dual - reference.dual_star).norm();
      const double scale = std::max({lhs, rhs, 1e-300});
      const double viol = (lhs - rhs) / scale;
      report.xn_bound_max_violation =
          std::max(report.xn_bound_max_violation, viol);
      if (lhs - rhs > std::max(rel_tol * scale, kAbsFloor)) {
        report.xn_bound_holds = false;
      }
    }
  }
  return report;
}

CertificateReport certify(const ProblemInstance& instance, double gamma,
                          double rank_tol) {
  CertificateReport report;
  const std::vector<Scenario> matched = matching_scenarios(instance, rank_tol);
  if (matched.empty()) return report;

  const bool needs_kappa =
      std::find(matched.begin(), matched.end(), Scenario::scenario2) !=
          matched.end() ||
      std::find(matched.begin(), matched.end(), Scenario::scenario3) !=
          matched.end();
  KappaResult kappa;
  if (needs_kappa) {
    kappa = compute_kappa(instance, rank_tol);
    report.kappa = kappa.kappa;
    report.rank_details = kappa.details;
  }

  for (Scenario s : matched) {
    ScenarioCertificate cert;
    cert.scenario = s;
    cert.gamma_bound = s == Scenario::scenario1
                           ? gamma_max_scenario1(instance)
                           : gamma_max_scenario23(instance);
    cert.gamma = gamma > 0.0 ? gamma : 0.99 * cert.gamma_bound;
    if (cert.gamma > 0.0 && std::isfinite(cert.gamma)) {
      switch (s) {
        case Scenario::scenario1:
          cert.delta = delta_scenario1(instance, cert.gamma);
          break;
        case Scenario::scenario2: {
          const Delta2Result d = delta_scenario2(instance, cert.gamma,
                                                 kappa.kappa);
          cert.delta = d.delta2;
          cert.aux = d.aux;
          break;
        }
        case Scenario::scenario3: {
          const Delta3Result d = delta_scenario3(instance, cert.gamma,
                                                 kappa.kappa);
          cert.delta = d.delta6;
          cert.aux = d.aux;
          break;
        }
        case Scenario::none:
          break;
      }
      cert.certified = cert.gamma < cert.gamma_bound && cert.delta > 0.0;
    }
    report.certificates.push_back(cert);
  }

  const ScenarioCertificate* best = nullptr;
  for (const ScenarioCertificate& cert : report.certificates) {
    if (!cert.certified) continue;
    if (best == nullptr || cert.delta > best->delta) best = &cert;
  }
  if (best != nullptr) {
    report.scenario = best->scenario;
    report.gamma_max = best->gamma_bound;
    report.gamma = best->gamma;
    report.delta = best->delta;
    report.auxiliary = best->aux;
  }
  return report;
}

}  // namespace admmcert::theory

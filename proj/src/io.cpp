#include "admmcert/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "admmcert/oracles.hpp"

namespace admmcert::io {

namespace {

constexpr const char* kInstanceFormat = "admmcert/instance";
constexpr const char* kReferenceFormat = "admmcert/reference";

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vector_from_json(const nlohmann::json& arr) {
  Vector v(arr.size());
  Eigen::Index i = 0;
  for (const auto& x : arr) v(i++) = x.get<double>();
  return v;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  }
  return arr;
}

Matrix matrix_from_json(const nlohmann::json& arr, int rows, int cols) {
  if (static_cast<int>(arr.size()) != rows * cols) {
    throw IoError("matrix entry count mismatch");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = arr[k++].get<double>();
  }
  return m;
}

nlohmann::json block_to_json(const BlockSpec& block) {
  nlohmann::json j;
  j["kind"] = block.oracle->kind();
  j["cols"] = block.cols();
  j["coupling"] = matrix_to_json(block.coupling);
  j["sigma"] = block.sigma;
  if (std::isinf(block.lipschitz)) {
    j["lipschitz"] = "inf";
  } else {
    j["lipschitz"] = block.lipschitz;
  }
  j["constrained"] = block.constrained;
  if (const auto* quad =
          dynamic_cast<const DiagQuadBlock*>(block.oracle.get())) {
    j["pdiag"] = vector_to_json(quad->pdiag());
    j["lin"] = vector_to_json(quad->lin());
  } else if (block.oracle->kind() != "l1" &&
             block.oracle->kind() != "nonneg") {
    throw IoError("block oracle '" + block.oracle->kind() +
                  "' is not serializable");
  }
  return j;
}

BlockSpec block_from_json(const nlohmann::json& j, int rows) {
  BlockSpec block;
  const int cols = j.at("cols").get<int>();
  block.coupling = matrix_from_json(j.at("coupling"), rows, cols);
  block.sigma = j.at("sigma").get<double>();
  const auto& lip = j.at("lipschitz");
  block.lipschitz =
      lip.is_string() ? kUnboundedLipschitz : lip.get<double>();
  block.constrained = j.at("constrained").get<bool>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "l1") {
    block.oracle = make_l1_block();
  } else if (kind == "nonneg") {
    block.oracle = make_nonneg_block(cols);
  } else if (kind == "quad_diag") {
    block.oracle = make_quadratic_block(vector_from_json(j.at("pdiag")),
                                        vector_from_json(j.at("lin")));
  } else {
    throw IoError("unknown block kind '" + kind + "'");
  }
  return block;
}

nlohmann::json read_json_file(const std::string& path,
                              const char* expected_format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (j.value("format", "") != expected_format) {
    throw IoError(path + ": expected a " + std::string(expected_format) +
                  " document");
  }
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_instance(const std::string& path, const ProblemInstance& instance,
                   const nlohmann::json& meta) {
  nlohmann::json j;
  j["format"] = kInstanceFormat;
  j["version"] = 1;
  j["p"] = instance.rows();
  j["rhs"] = vector_to_json(instance.rhs());
  nlohmann::json blocks = nlohmann::json::array();
  for (const BlockSpec& b : instance.blocks()) blocks.push_back(block_to_json(b));
  j["blocks"] = std::move(blocks);
  if (!meta.empty()) j["meta"] = meta;
  write_json_file(path, j);
}

StoredInstance load_instance(const std::string& path) {
  const nlohmann::json j = read_json_file(path, kInstanceFormat);
  try {
    const int rows = j.at("p").get<int>();
    std::vector<BlockSpec> blocks;
    for (const auto& bj : j.at("blocks")) {
      blocks.push_back(block_from_json(bj, rows));
    }
    ProblemInstance instance(std::move(blocks),
                             vector_from_json(j.at("rhs")));
    return StoredInstance{std::move(instance),
                          j.value("meta", nlohmann::json::object())};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void save_reference(const std::string& path, const ReferenceSolution& ref) {
  nlohmann::json j;
  j["format"] = kReferenceFormat;
  j["version"] = 1;
  nlohmann::json primal = nlohmann::json::array();
  for (const Vector& x : ref.primal_star) primal.push_back(vector_to_json(x));
  j["primal"] = std::move(primal);
  if (ref.has_dual()) j["dual"] = vector_to_json(ref.dual_star);
  if (std::isfinite(ref.kkt_residual)) j["kkt_residual"] = ref.kkt_residual;
  write_json_file(path, j);
}

ReferenceSolution load_reference(const std::string& path) {
  const nlohmann::json j = read_json_file(path, kReferenceFormat);
  ReferenceSolution ref;
  try {
    for (const auto& xj : j.at("primal")) {
      ref.primal_star.push_back(vector_from_json(xj));
    }
    if (j.contains("dual")) ref.dual_star = vector_from_json(j.at("dual"));
    ref.kkt_residual = j.value("kkt_residual",
                               std::numeric_limits<double>::infinity());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return ref;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "iteration,primal_residual,dual_change,relative_error,lyapunov,"
         "contraction_factor\n";
  const TraceRecord* prev = nullptr;
  for (const TraceRecord& rec : trace) {
    out << rec.iteration << ',' << format_double(rec.primal_residual) << ','
        << format_double(rec.dual_change) << ',';
    if (rec.relative_error) out << format_double(*rec.relative_error);
    out << ',';
    if (rec.lyapunov) out << format_double(*rec.lyapunov);
    out << ',';
    if (rec.lyapunov && prev != nullptr && prev->lyapunov) {
      out << format_double(*rec.lyapunov / *prev->lyapunov);
    }
    out << '\n';
    prev = &rec;
  }
  if (!out) throw IoError("failed writing " + path);
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty trace");
  std::vector<TraceRecord> trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    TraceRecord rec;
    std::getline(ss, field, ',');
    rec.iteration = std::stoi(field);
    std::getline(ss, field, ',');
    rec.primal_residual = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    rec.dual_change = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    if (!field.empty()) rec.relative_error = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    if (!field.empty()) rec.lyapunov = std::strtod(field.c_str(), nullptr);
    trace.push_back(rec);
  }
  return trace;
}

nlohmann::json certificate_to_json(const theory::CertificateReport& report) {
  const auto scenario_json = [](const theory::ScenarioCertificate& cert) {
    nlohmann::json j;
    j["scenario"] = theory::to_string(cert.scenario);
    j["gamma_bound"] = cert.gamma_bound;
    j["gamma"] = cert.gamma;
    j["delta"] = cert.delta;
    j["certified"] = cert.certified;
    if (cert.scenario != theory::Scenario::scenario1) {
      j["delta3"] = cert.aux.delta3;
      j["delta4"] = cert.aux.delta4;
      j["delta5"] = cert.aux.delta5;
    }
    return j;
  };

  nlohmann::json j;
  j["format"] = "admmcert/certificate";
  j["version"] = 1;
  j["scenario"] = theory::to_string(report.scenario);
  j["certified"] = report.certified();
  if (report.certified()) {
    j["gamma_max"] = report.gamma_max;
    j["gamma"] = report.gamma;
    j["delta"] = report.delta;
  }
  if (std::isfinite(report.kappa)) {
    j["kappa"] = report.kappa;
    j["rank"] = report.rank_details.rank;
    j["rows"] = report.rank_details.rows;
    j["full_row_rank"] = report.rank_details.full_row_rank;
    j["rank_ambiguous"] = report.rank_details.ambiguous;
    if (!report.rank_details.selected_rows.empty()) {
      j["selected_rows"] = report.rank_details.selected_rows;
    }
  }
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& cert : report.certificates) certs.push_back(scenario_json(cert));
  j["scenarios"] = std::move(certs);
  return j;
}

void save_certificate(const std::string& path,
                      const theory::CertificateReport& report) {
  write_json_file(path, certificate_to_json(report));
}

}  // namespace admmcert::io

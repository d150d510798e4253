#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "admmcert/core.hpp"
#include "admmcert/solvers.hpp"
#include "admmcert/theory.hpp"

namespace admmcert::io {

/// Raised for unreadable, unwritable, or malformed files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StoredInstance {
  ProblemInstance instance;
  nlohmann::json meta;  // family, seed, params, planted ground truth, ...
};

/// Instance document: dimensions, dense couplings row-major, block oracle
/// data and regularity constants, plus a free-form meta object. Doubles
/// round-trip exactly.
void save_instance(const std::string& path, const ProblemInstance& instance,
                   const nlohmann::json& meta = nlohmann::json::object());
StoredInstance load_instance(const std::string& path);

void save_reference(const std::string& path, const ReferenceSolution& ref);
ReferenceSolution load_reference(const std::string& path);

/// Comma-separated trace, one row per iteration, header
/// iteration,primal_residual,dual_change,relative_error,lyapunov,contraction_factor
/// with 17-significant-digit values and empty fields for missing data.
/// contraction_factor is the ratio of consecutive lyapunov values.
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

nlohmann::json certificate_to_json(const theory::CertificateReport& report);
void save_certificate(const std::string& path,
                      const theory::CertificateReport& report);

}  // namespace admmcert::io

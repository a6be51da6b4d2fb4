#pragma once

// Experiment records and their CSV / JSON / summary serializations.

#include <complex>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace freelab {

using cplx = std::complex<double>;

struct ExperimentRecord {
  std::string experiment_id;
  std::int64_t n = 0;
  std::int64_t k = 0;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::int64_t n_samples = 0;
  cplx predicted;
  cplx mean;
  double std_error = 0.0;
  double abs_dev = 0.0;
  double rel_dev = 0.0;  // abs_dev / |predicted|, NaN when predicted == 0
  double wall_ms = 0.0;

  /// Recomputes abs_dev and rel_dev from predicted and mean.
  void update_deviation();
};

ExperimentRecord make_record(std::string id, std::int64_t n, std::int64_t k, nlohmann::json params, std::uint64_t seed,
                             std::int64_t n_samples, cplx predicted, cplx mean, double std_error, double wall_ms);

/// Column order of the CSV body.
extern const std::vector<std::string> kRecordColumns;

/// Round-trippable number formatting ("%.17g"; "nan", "inf", "-inf").
std::string format_double(double v);

/// One CSV line (no newline) for `r`; params_json is quoted per RFC 4180.
std::string to_csv_row(const ExperimentRecord& r);
nlohmann::json to_json(const ExperimentRecord& r);

/// Writes '#'-prefixed header lines, the column header and all rows.
void write_csv(std::ostream& out, const std::vector<std::string>& header_lines,
               const std::vector<ExperimentRecord>& records);
/// {"header": [...], "records": [...]}.
void write_json(std::ostream& out, const std::vector<std::string>& header_lines,
                const std::vector<ExperimentRecord>& records);
/// Plain-text table: id, N, k, prediction, mean, deviation.
void write_summary(std::ostream& out, const std::vector<ExperimentRecord>& records);

}  // namespace freelab

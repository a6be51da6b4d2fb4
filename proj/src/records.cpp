#include "freelab/records.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>

namespace freelab {

const std::vector<std::string> kRecordColumns = {"experiment_id", "N",       "k",       "params_json", "seed",
                                                 "n_samples",     "pred_re", "pred_im", "mean_re",     "mean_im",
                                                 "stderr",        "abs_dev", "rel_dev", "wall_ms"};

void ExperimentRecord::update_deviation() {
  abs_dev = std::abs(mean - predicted);
  const double p = std::abs(predicted);
  rel_dev = p > 0.0 ? abs_dev / p : std::numeric_limits<double>::quiet_NaN();
}

ExperimentRecord make_record(std::string id, std::int64_t n, std::int64_t k, nlohmann::json params, std::uint64_t seed,
                             std::int64_t n_samples, cplx predicted, cplx mean, double std_error, double wall_ms) {
  ExperimentRecord r;
  r.experiment_id = std::move(id);
  r.n = n;
  r.k = k;
  r.params = std::move(params);
  r.seed = seed;
  r.n_samples = n_samples;
  r.predicted = predicted;
  r.mean = mean;
  r.std_error = std_error;
  r.wall_ms = wall_ms;
  r.update_deviation();
  return r;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);  // JSON has no NaN / infinity literals
}

}  // namespace

std::string to_csv_row(const ExperimentRecord& r) {
  std::string s;
  s += csv_quote(r.experiment_id) + ',';
  s += std::to_string(r.n) + ',' + std::to_string(r.k) + ',';
  s += csv_quote(r.params.dump()) + ',';
  s += std::to_string(r.seed) + ',' + std::to_string(r.n_samples) + ',';
  s += format_double(r.predicted.real()) + ',' + format_double(r.predicted.imag()) + ',';
  s += format_double(r.mean.real()) + ',' + format_double(r.mean.imag()) + ',';
  s += format_double(r.std_error) + ',' + format_double(r.abs_dev) + ',' + format_double(r.rel_dev) + ',';
  s += format_double(r.wall_ms);
  return s;
}

nlohmann::json to_json(const ExperimentRecord& r) {
  return {{"experiment_id", r.experiment_id},
          {"N", r.n},
          {"k", r.k},
          {"params", r.params},
          {"seed", r.seed},
          {"n_samples", r.n_samples},
          {"pred_re", json_number(r.predicted.real())},
          {"pred_im", json_number(r.predicted.imag())},
          {"mean_re", json_number(r.mean.real())},
          {"mean_im", json_number(r.mean.imag())},
          {"stderr", json_number(r.std_error)},
          {"abs_dev", json_number(r.abs_dev)},
          {"rel_dev", json_number(r.rel_dev)},
          {"wall_ms", json_number(r.wall_ms)}};
}

void write_csv(std::ostream& out, const std::vector<std::string>& header_lines,
               const std::vector<ExperimentRecord>& records) {
  for (const auto& h : header_lines) out << "# " << h << '\n';
  for (std::size_t i = 0; i < kRecordColumns.size(); ++i) out << (i ? "," : "") << kRecordColumns[i];
  out << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
}

void write_json(std::ostream& out, const std::vector<std::string>& header_lines,
                const std::vector<ExperimentRecord>& records) {
  nlohmann::json j;
  j["header"] = header_lines;
  j["records"] = nlohmann::json::array();
  for (const auto& r : records) j["records"].push_back(to_json(r));
  out << j.dump(2) << '\n';
}

void write_summary(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << std::left << std::setw(28) << "experiment_id" << std::right << std::setw(6) << "N" << std::setw(4) << "k"
      << std::setw(14) << "pred_re" << std::setw(14) << "mean_re" << std::setw(12) << "stderr" << std::setw(12)
      << "abs_dev" << '\n';
  out << std::setprecision(5);
  for (const auto& r : records)
    out << std::left << std::setw(28) << r.experiment_id << std::right << std::setw(6) << r.n << std::setw(4) << r.k
        << std::setw(14) << r.predicted.real() << std::setw(14) << r.mean.real() << std::setw(12) << r.std_error
        << std::setw(12) << r.abs_dev << '\n';
}

}  // namespace freelab

#include "freelab/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>

#include "freelab/errors.hpp"

namespace freelab {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"run.seed", "1"},
      {"run.workers", "0"},
      {"run.out", "."},
      {"run.format", "csv"},
      {"run.timing", "true"},

      {"ensemble.symmetry", "complex-hermitian"},
      {"ensemble.offdiag_law", "gaussian"},
      {"ensemble.diag_law", "gaussian"},
      {"ensemble.diag_variance", ""},
      {"ensemble.pseudo_variance", "0"},

      {"locallaw.n", "256,512,1024,2048"},
      {"locallaw.eta", "1"},
      {"locallaw.k", "1"},
      {"locallaw.energy", "0"},
      {"locallaw.conjugate_alternate", "false"},
      {"locallaw.samples", "100"},
      {"locallaw.observable", "traceless-diagonal-pm1"},
      {"locallaw.final_observable", "traceless-diagonal-pm1"},
      {"locallaw.isotropic", "true"},
      {"locallaw.vectors", "basis"},

      {"thermalise.n", "2048"},
      {"thermalise.t_min", "2"},
      {"thermalise.t_max", "30"},
      {"thermalise.t_step", "0.25"},
      {"thermalise.samples", "50"},
      {"thermalise.a", "traceless-diagonal-pm1"},
      {"thermalise.b", "traceless-diagonal-pm1"},
      {"thermalise.c", "traceless-diagonal-pm1"},
      {"thermalise.isotropic", "false"},
      {"thermalise.vectors", "basis"},
      {"thermalise.pairs", ""},
      {"thermalise.envelope_resolution", "3"},

      {"freeness.n", "1024"},
      {"freeness.separations", "0,2,5,10,20"},
      {"freeness.window", "1.5707963267948966"},
      {"freeness.window_points", "7"},
      {"freeness.observables", "traceless-diagonal-pm1,traceless-diagonal-pm1"},
      {"freeness.degrees", "1,1"},
      {"freeness.samples", "20"},

      {"verify.k_max", "6"},
      {"verify.perturb_q", "0"},
      {"verify.tolerance", "1e-8"},
  };
  return d;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ValidationError("setting " + key + " = '" + value + "' is not " + expected);
}

}  // namespace

std::string trim(const std::string& text) {
  const auto b = text.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = text.find_last_not_of(" \t\r\n");
  return text.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("unknown configuration key '" + key + "'");
  it->second = trim(value);
}

void RunConfig::load(std::istream& in, const std::string& source) {
  std::string line, section;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto cut = line.find_first_of("#;");
    const std::string text = trim(cut == std::string::npos ? line : line.substr(0, cut));
    if (text.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (text.front() == '[') {
      if (text.back() != ']') throw ValidationError(where + ": malformed section header '" + text + "'");
      section = trim(text.substr(1, text.size() - 2));
      if (section.empty()) throw ValidationError(where + ": empty section name");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected 'key = value', got '" + text + "'");
    const std::string name = trim(text.substr(0, eq));
    if (name.empty()) throw ValidationError(where + ": missing key before '='");
    const std::string key = section.empty() || name.find('.') != std::string::npos ? name : section + "." + name;
    if (!values_.count(key)) throw ValidationError(where + ": unknown configuration key '" + key + "'");
    values_[key] = trim(text.substr(eq + 1));
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open configuration file '" + path + "'");
  load(in, path);
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("unknown configuration key '" + key + "'");
  return it->second;
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  bad_value(key, v, "a number");
}

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "an integer in range");
  return out;
}

}  // namespace

double RunConfig::get_double(const std::string& key) const { return parse_double(key, get(key)); }
std::int64_t RunConfig::get_int(const std::string& key) const { return parse_integer<std::int64_t>(key, get(key)); }
std::uint64_t RunConfig::get_uint(const std::string& key) const { return parse_integer<std::uint64_t>(key, get(key)); }

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) out.push_back(parse_double(key, item));
  return out;
}

std::vector<std::int64_t> RunConfig::get_ints(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(get(key))) out.push_back(parse_integer<std::int64_t>(key, item));
  return out;
}

std::vector<std::string> RunConfig::get_strings(const std::string& key) const { return split_list(get(key)); }

EnsembleSpec RunConfig::ensemble(std::size_t n) const {
  EnsembleSpec s;
  s.n = n;
  s.symmetry = parse_symmetry(get("ensemble.symmetry"));
  s.offdiag_law = parse_entry_law(get("ensemble.offdiag_law"));
  s.diag_law = parse_entry_law(get("ensemble.diag_law"));
  if (!get("ensemble.diag_variance").empty()) s.diag_variance = get_double("ensemble.diag_variance");
  s.offdiag_pseudo_variance = get_double("ensemble.pseudo_variance");
  s.validate();
  return s;
}

std::vector<std::string> RunConfig::effective_lines() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k + " = " + v);
  return out;
}

}  // namespace freelab

#pragma once

// Run configuration: a registry of known "section.key" settings with
// defaults, loaded from a flat key = value file with [section] headers and
// overridden from the command line. Unknown keys are errors.

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "freelab/wigner.hpp"

namespace freelab {

class RunConfig {
 public:
  /// Every known key at its default value.
  RunConfig();

  /// Reads `key = value` lines; '#' or ';' start comments and `[name]` opens a
  /// section. Throws ValidationError naming the source and line for malformed
  /// lines or unknown keys.
  void load(std::istream& in, const std::string& source = "<config>");
  void load_file(const std::string& path);

  /// Overrides one setting ("section.key"). Throws ValidationError for
  /// unknown keys.
  void set(const std::string& key, const std::string& value);
  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Comma-separated values; an empty setting yields an empty list.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::int64_t> get_ints(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  /// Ensemble spec from the [ensemble] section with dimension n.
  EnsembleSpec ensemble(std::size_t n) const;

  /// "section.key = value" for every setting, in key order.
  std::vector<std::string> effective_lines() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Splits on commas and trims whitespace; empty input gives an empty list.
std::vector<std::string> split_list(const std::string& text);
std::string trim(const std::string& text);

}  // namespace freelab

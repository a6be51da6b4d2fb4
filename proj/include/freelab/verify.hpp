#pragma once

// The deterministic identity battery: combinatorial laws of the partition and
// graph lattices, cross-route agreement of divided differences, cumulants and
// M_[k], and the Bessel kernel checks. Each identity reports its worst
// residual against a fixed tolerance.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace freelab {

struct VerifyOptions {
  /// Largest chain order for analytic checks; values below 6 also shrink the
  /// combinatorial sizes.
  std::size_t k_max = 6;
  /// Relative perturbation applied to the pair factors q fed to the graph
  /// routes. Nonzero values exist to confirm the suite can fail.
  double perturb_q = 0.0;
  std::uint64_t seed = 1;
};

struct IdentityCheck {
  std::string name;
  double worst_residual = 0.0;
  double tolerance = 0.0;
  std::size_t cases = 0;
  double seconds = 0.0;
  bool passed() const { return worst_residual <= tolerance; }
};

struct VerifyReport {
  std::vector<IdentityCheck> checks;
  bool all_passed() const;
  double worst_residual() const;
};

/// Throws ValidationError when k_max is 0 or exceeds 8.
VerifyReport run_verify_suite(const VerifyOptions& options = {});

/// One "PASS|FAIL name residual tolerance cases" line per identity plus a
/// closing summary line.
void print_report(const VerifyReport& report, std::ostream& out);

}  // namespace freelab

#pragma once

// Set-indexed scalar functions f : 2^[k] -> C and the moment/free-cumulant
// transform over the non-crossing partition lattice.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"

namespace freelab {

using cplx = std::complex<double>;

inline constexpr std::size_t kSetFunctionCap = 12;

/// Dense table over the 2^k - 1 nonempty subsets of {1..k}. A subset is
/// addressed either by a sorted element list or by its bitmask, bit i-1
/// standing for element i.
class SetFunction {
 public:
  using Mask = std::uint32_t;

  /// Zero table of order k. Throws SizeLimitError for k > kSetFunctionCap and
  /// ValidationError for k == 0.
  explicit SetFunction(std::size_t k);

  /// Fills the table from `f`, called once per subset with its sorted elements.
  static SetFunction from_function(std::size_t k, const std::function<cplx(std::span<const int>)>& f);

  std::size_t k() const { return k_; }
  Mask full_mask() const { return (Mask{1} << k_) - 1; }

  cplx operator[](Mask subset) const { return values_[index(subset)]; }
  cplx& operator[](Mask subset) { return values_[index(subset)]; }

  cplx at(std::span<const int> subset) const { return values_[index(mask_of(subset))]; }
  void set(std::span<const int> subset, cplx value) { values_[index(mask_of(subset))] = value; }

  Mask mask_of(std::span<const int> subset) const;
  static std::vector<int> elements_of(Mask subset);

  /// [{"subset":[...], "re":x, "im":y}, ...] ordered by bitmask.
  nlohmann::json to_json() const;
  static SetFunction from_json(const nlohmann::json& j);

 private:
  std::size_t index(Mask subset) const;

  std::size_t k_;
  std::vector<cplx> values_;  // slot s-1 holds subset s
};

/// f_circ[S] = sum_{pi in NCP(S)} mu(pi, 1_S) prod_{B in pi} f[B].
SetFunction free_cumulant_table(const SetFunction& f);

/// f[S] = sum_{pi in NCP(S)} prod_{B in pi} f_circ[B].
SetFunction moments_from_cumulants(const SetFunction& f_circ);

}  // namespace freelab

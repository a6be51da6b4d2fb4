#include "freelab/cumulants.hpp"

#include <algorithm>
#include <string>

#include "freelab/detail/lattice_tables.hpp"
#include "freelab/errors.hpp"

namespace freelab {

SetFunction::SetFunction(std::size_t k) : k_(k) {
  if (k == 0) throw ValidationError("set function order must be at least 1");
  if (k > kSetFunctionCap) throw SizeLimitError("set function", k, kSetFunctionCap);
  values_.assign((std::size_t{1} << k) - 1, cplx{});
}

SetFunction SetFunction::from_function(std::size_t k, const std::function<cplx(std::span<const int>)>& f) {
  SetFunction out(k);
  for (Mask s = 1; s <= out.full_mask(); ++s) {
    const auto elems = elements_of(s);
    out[s] = f(elems);
  }
  return out;
}

std::size_t SetFunction::index(Mask subset) const {
  if (subset == 0 || subset > full_mask())
    throw ValidationError("subset mask " + std::to_string(subset) + " outside 2^[" + std::to_string(k_) + "]");
  return subset - 1;
}

SetFunction::Mask SetFunction::mask_of(std::span<const int> subset) const {
  Mask m = 0;
  for (int e : subset) {
    if (e < 1 || static_cast<std::size_t>(e) > k_)
      throw ValidationError("element " + std::to_string(e) + " outside [" + std::to_string(k_) + "]");
    const Mask bit = Mask{1} << (e - 1);
    if (m & bit) throw ValidationError("repeated element " + std::to_string(e) + " in subset");
    m |= bit;
  }
  if (m == 0) throw ValidationError("subset must be nonempty");
  return m;
}

std::vector<int> SetFunction::elements_of(Mask subset) {
  std::vector<int> out;
  for (; subset != 0; subset &= subset - 1) out.push_back(detail::lowest_index(subset) + 1);
  return out;
}

nlohmann::json SetFunction::to_json() const {
  auto arr = nlohmann::json::array();
  for (Mask s = 1; s <= full_mask(); ++s)
    arr.push_back({{"subset", elements_of(s)}, {"re", (*this)[s].real()}, {"im", (*this)[s].imag()}});
  return arr;
}

SetFunction SetFunction::from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("set function JSON must be a nonempty list");
  // 2^k - 1 entries determine k.
  std::size_t k = 0;
  while ((std::size_t{1} << k) - 1 < j.size()) ++k;
  if ((std::size_t{1} << k) - 1 != j.size()) throw ValidationError("set function JSON has an incomplete table");
  SetFunction out(k);
  std::vector<bool> seen(j.size(), false);
  for (const auto& entry : j) {
    const auto subset = entry.at("subset").get<std::vector<int>>();
    const Mask m = out.mask_of(subset);
    if (seen[m - 1]) throw ValidationError("set function JSON repeats a subset");
    seen[m - 1] = true;
    out[m] = cplx(entry.at("re").get<double>(), entry.at("im").get<double>());
  }
  return out;
}

namespace {

template <bool WithMobius>
SetFunction partition_transform(const SetFunction& f) {
  SetFunction out(f.k());
  for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) {
    const auto& table = detail::ncp_table(static_cast<std::size_t>(detail::popcount(s)));
    // Terms of mixed sign cancel heavily for large |S|; extended precision
    // keeps the round trip near double rounding.
    using wide = std::complex<long double>;
    wide sum{};
    for (const auto& entry : table) {
      wide term = WithMobius ? wide(static_cast<long double>(entry.mobius)) : wide(1.0L);
      for (detail::Mask b : entry.blocks) term *= wide(f[detail::spread_bits(b, s)]);
      sum += term;
    }
    out[s] = cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
  }
  return out;
}

}  // namespace

SetFunction free_cumulant_table(const SetFunction& f) { return partition_transform<true>(f); }

SetFunction moments_from_cumulants(const SetFunction& f_circ) { return partition_transform<false>(f_circ); }

}  // namespace freelab

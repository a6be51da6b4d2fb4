#include "freelab/reference.hpp"

#include <algorithm>
#include <map>

#include "freelab/errors.hpp"

namespace freelab::reference {

std::int64_t mobius_recursive(const NonCrossingPartition& pi) {
  // Walk the interval [pi, 1_S] from the bottom: coarser partitions have fewer
  // blocks, so sorting by decreasing block count is a linear extension.
  std::vector<NonCrossingPartition> above;
  for (auto& rho : enumerate_ncp(pi.ground()))
    if (refinement_leq(pi, rho)) above.push_back(std::move(rho));
  std::stable_sort(above.begin(), above.end(),
                   [](const auto& a, const auto& b) { return a.num_blocks() > b.num_blocks(); });
  std::vector<std::int64_t> mu(above.size(), 0);
  for (std::size_t i = 0; i < above.size(); ++i) {
    if (above[i] == pi) {
      mu[i] = 1;
      continue;
    }
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < i; ++j)
      if (refinement_leq(above[j], above[i])) sum += mu[j];
    mu[i] = -sum;
  }
  return mu.back();  // 1_S is the unique partition with one block
}

SetFunction cumulants_recursive(const SetFunction& f) {
  SetFunction out(f.k());
  std::vector<SetFunction::Mask> order;
  for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) order.push_back(s);
  std::stable_sort(order.begin(), order.end(),
                   [](auto a, auto b) { return __builtin_popcount(a) < __builtin_popcount(b); });
  for (SetFunction::Mask s : order) {
    const auto elems = SetFunction::elements_of(s);
    const GroundSet ground(elems);
    cplx rest{};
    for (const auto& p : enumerate_ncp(ground)) {
      if (p.num_blocks() == 1) continue;
      cplx term = 1.0;
      for (const auto& b : p.blocks()) term *= out.at(b);
      rest += term;
    }
    out[s] = f[s] - rest;
  }
  return out;
}

std::uint64_t catalan_recurrence(unsigned n) {
  std::vector<std::uint64_t> c(n + 1, 0);
  c[0] = 1;
  for (unsigned m = 0; m < n; ++m)
    for (unsigned i = 0; i <= m; ++i) c[m + 1] += c[i] * c[m - i];
  return c[n];
}

std::vector<std::int64_t> dissection_polynomial(unsigned n) {
  if (n < 3) throw ValidationError("dissection polynomial recursion starts at n = 3");
  std::vector<std::int64_t> b{1};
  for (unsigned k = 3; k < n; ++k) {
    std::vector<std::int64_t> next(b.size() + 1, 0);
    for (std::size_t j = 0; j < b.size(); ++j) {
      next[j] += b[j];
      next[j + 1] += 2 * b[j];
    }
    // 2w(1+w) b'(w) / k; only the full coefficient is guaranteed divisible.
    std::vector<std::int64_t> num(b.size() + 1, 0);
    for (std::size_t j = 1; j < b.size(); ++j) {
      const std::int64_t d = 2 * static_cast<std::int64_t>(j) * b[j];
      num[j] += d;
      num[j + 1] += d;
    }
    for (std::size_t e = 0; e < num.size(); ++e) {
      if (num[e] % static_cast<std::int64_t>(k) != 0) throw NumericError("dissection recursion: inexact division");
      next[e] += num[e] / static_cast<std::int64_t>(k);
    }
    while (next.size() > 1 && next.back() == 0) next.pop_back();
    b = std::move(next);
  }
  return b;
}

std::vector<std::int64_t> graph_polynomial(unsigned n) {
  if (n == 0) throw ValidationError("graph polynomial needs n >= 1");
  if (n == 1) return {1};
  if (n == 2) return {1, 1};
  std::vector<std::int64_t> p = dissection_polynomial(n);
  for (unsigned i = 0; i < n; ++i) {
    std::vector<std::int64_t> next(p.size() + 1, 0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      next[j] += p[j];
      next[j + 1] += p[j];
    }
    p = std::move(next);
  }
  return p;
}

}  // namespace freelab::reference

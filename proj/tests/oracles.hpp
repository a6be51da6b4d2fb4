#pragma once

// Definition-level reimplementations used as test oracles. Nothing here calls
// into the library: partitions come from restricted growth strings, the
// Kreweras complement from a search over all partitions of the primed points,
// the Moebius function from its defining recursion, divided differences from
// the Lagrange form, and semicircle averages from Simpson's rule.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Part = std::vector<std::vector<int>>;

inline Part canonical(Part p) {
  for (auto& b : p) std::sort(b.begin(), b.end());
  std::sort(p.begin(), p.end());
  return p;
}

// Every set partition of {1..n}, via restricted growth strings.
inline std::vector<Part> set_partitions(int n) {
  std::vector<Part> out;
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == n) {
      Part p(static_cast<std::size_t>(blocks));
      for (int j = 0; j < n; ++j) p[static_cast<std::size_t>(a[static_cast<std::size_t>(j)])].push_back(j + 1);
      out.push_back(canonical(p));
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      a[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  if (n == 0) return {Part{}};
  rec(0, 0);
  return out;
}

// a < b < c < d with a, c in one block and b, d in another.
inline bool crossing(const Part& p) {
  std::map<int, std::size_t> owner;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (int x : p[i]) owner[x] = i;
  std::vector<int> pts;
  for (auto& [x, b] : owner) pts.push_back(x);
  const std::size_t n = pts.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        for (std::size_t d = c + 1; d < n; ++d)
          if (owner[pts[a]] == owner[pts[c]] && owner[pts[b]] == owner[pts[d]] && owner[pts[a]] != owner[pts[b]])
            return true;
  return false;
}

inline std::vector<Part> noncrossing(int n) {
  std::vector<Part> out;
  for (auto& p : set_partitions(n))
    if (!crossing(p)) out.push_back(p);
  return out;
}

inline bool leq(const Part& pi, const Part& sigma) {
  for (const auto& b : pi) {
    bool inside = false;
    for (const auto& c : sigma)
      if (std::includes(c.begin(), c.end(), b.begin(), b.end())) inside = true;
    if (!inside) return false;
  }
  return true;
}

// Coarsest sigma such that pi on points 1,3,5,.. together with sigma on the
// interleaved points 2,4,6,.. is non-crossing.
inline Part kreweras(const Part& pi, int n) {
  Part best;
  std::size_t best_blocks = static_cast<std::size_t>(n) + 1;
  for (const auto& sigma : set_partitions(n)) {
    Part joint;
    for (const auto& b : pi) {
      std::vector<int> nb;
      for (int x : b) nb.push_back(2 * x - 1);
      joint.push_back(nb);
    }
    for (const auto& b : sigma) {
      std::vector<int> nb;
      for (int x : b) nb.push_back(2 * x);
      joint.push_back(nb);
    }
    if (!crossing(joint) && sigma.size() < best_blocks) {
      best = sigma;
      best_blocks = sigma.size();
    }
  }
  return best;
}

// mu(pi, 1_n) from mu(pi, pi) = 1 and sum_{pi <= rho <= sigma} mu(pi, rho) = 0.
inline std::int64_t mobius_to_top(const Part& pi, int n) {
  auto lattice = noncrossing(n);
  std::vector<Part> above;
  for (auto& r : lattice)
    if (leq(pi, r)) above.push_back(r);
  std::sort(above.begin(), above.end(), [](const Part& a, const Part& b) { return a.size() > b.size(); });
  std::map<Part, std::int64_t> mu;
  for (const auto& sigma : above) {
    if (sigma == canonical(pi)) {
      mu[sigma] = 1;
      continue;
    }
    std::int64_t s = 0;
    for (auto& [rho, v] : mu)
      if (rho != sigma && leq(rho, sigma)) s += v;
    mu[sigma] = -s;
  }
  Part top(1);
  for (int i = 1; i <= n; ++i) top[0].push_back(i);
  return mu[top];
}

inline std::uint64_t catalan(unsigned n) {
  // C(2n, n) / (n + 1) by exact running products.
  std::uint64_t c = 1;
  for (unsigned i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

// Stieltjes transform of the semicircle from the quadratic formula, choosing
// the root in the same half-plane as z.
inline cplx stieltjes(cplx z) {
  const cplx r = std::sqrt(z * z - 4.0);
  const cplx a = (-z + r) / 2.0, b = (-z - r) / 2.0;
  return (a.imag() * z.imag() > 0) ? a : b;
}

// Lagrange form sum_i m(z_i) / prod_{j != i} (z_i - z_j); distinct points only.
inline cplx divided_difference(const std::vector<cplx>& z) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    cplx d = 1.0;
    for (std::size_t j = 0; j < z.size(); ++j)
      if (j != i) d *= z[i] - z[j];
    s += stieltjes(z[i]) / d;
  }
  return s;
}

// <f>_sc with x = 2cos(theta), rho dx = (2/pi) sin^2(theta) d(theta), composite
// Simpson on [0, pi].
inline cplx sc_average(const std::function<cplx(double)>& f, int panels = 20000) {
  const double h = M_PI / panels;
  cplx s = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double th = i * h;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double sn = std::sin(th);
    s += w * f(2.0 * std::cos(th)) * sn * sn;
  }
  return s * h / 3.0 * 2.0 / M_PI;
}

// Even in s; the library routine only accepts nonnegative arguments.
inline double phi(double s) { return s == 0.0 ? 1.0 : std::cyl_bessel_j(1.0, 2.0 * std::abs(s)) / std::abs(s); }

inline cplx random_cplx(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

}  // namespace oracle

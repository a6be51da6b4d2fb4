#include <random>

#include "doctest.h"
#include "freelab/cumulants.hpp"
#include "freelab/errors.hpp"
#include "oracles.hpp"

using namespace freelab;

namespace {

SetFunction random_table(std::size_t k, std::mt19937_64& rng) {
  SetFunction f(k);
  for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) f[s] = oracle::random_cplx(rng);
  return f;
}

// f_circ[S] from the brute-force lattice and the recursive Moebius oracle.
cplx oracle_cumulant(const SetFunction& f, SetFunction::Mask s) {
  const auto elems = SetFunction::elements_of(s);
  const int n = static_cast<int>(elems.size());
  cplx total = 0.0;
  for (const auto& pi : oracle::noncrossing(n)) {
    cplx prod = static_cast<double>(oracle::mobius_to_top(pi, n));
    for (const auto& block : pi) {
      SetFunction::Mask b = 0;
      for (int pos : block) b |= SetFunction::Mask{1} << (elems[static_cast<std::size_t>(pos - 1)] - 1);
      prod *= f[b];
    }
    total += prod;
  }
  return total;
}

double table_scale(const SetFunction& f) {
  double m = 0.0;
  for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) m = std::max(m, std::abs(f[s]));
  return m;
}

}  // namespace

TEST_CASE("subset addressing") {
  SetFunction f(4);
  const std::vector<int> s = {1, 3, 4};
  CHECK(f.mask_of(s) == 0b1101u);
  CHECK(SetFunction::elements_of(0b1101u) == s);
  f.set(s, {2.0, -1.0});
  CHECK(f[0b1101u] == cplx(2.0, -1.0));
  CHECK(f.at(s) == cplx(2.0, -1.0));
  CHECK_THROWS_AS(SetFunction(0), ValidationError);
  CHECK_THROWS_AS(SetFunction(13), SizeLimitError);
  CHECK_THROWS(f.mask_of(std::vector<int>{5}));
}

TEST_CASE("JSON round trip") {
  std::mt19937_64 rng(3);
  const auto f = random_table(3, rng);
  const auto g = SetFunction::from_json(f.to_json());
  for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) CHECK(g[s] == f[s]);
}

TEST_CASE("singletons and pairs") {
  std::mt19937_64 rng(5);
  const auto f = random_table(4, rng);
  const auto c = free_cumulant_table(f);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(c[1u << i] - f[1u << i]) < 1e-15);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const SetFunction::Mask a = 1u << i, b = 1u << j;
      CHECK(std::abs(c[a | b] - (f[a | b] - f[a] * f[b])) < 1e-14);
    }
}

TEST_CASE("triple formula") {
  std::mt19937_64 rng(7);
  const auto f = random_table(3, rng);
  const auto c = free_cumulant_table(f);
  const cplx expect = f[7] - f[3] * f[4] - f[5] * f[2] - f[6] * f[1] + 2.0 * f[1] * f[2] * f[4];
  CHECK(std::abs(c[7] - expect) < 1e-13);
}

TEST_CASE("constant table has cumulants only on singletons") {
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto f = SetFunction::from_function(k, [](std::span<const int>) { return cplx(1.0); });
    const auto c = free_cumulant_table(f);
    for (SetFunction::Mask s = 1; s <= c.full_mask(); ++s) {
      const cplx expect = std::popcount(s) == 1 ? 1.0 : 0.0;
      CHECK(std::abs(c[s] - expect) < 1e-14);
    }
  }
}

TEST_CASE("cumulants agree with the brute-force Moebius inversion") {
  std::mt19937_64 rng(11);
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto f = random_table(k, rng);
    const auto c = free_cumulant_table(f);
    for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s)
      CHECK(std::abs(c[s] - oracle_cumulant(f, s)) <= 1e-12 * table_scale(c));
  }
}

TEST_CASE("moments from cumulants") {
  for (std::size_t k = 1; k <= 5; ++k) {
    SetFunction zero(k);
    const auto m0 = moments_from_cumulants(zero);
    for (SetFunction::Mask s = 1; s <= m0.full_mask(); ++s) CHECK(m0[s] == cplx(0.0));
    const auto delta = SetFunction::from_function(k, [](std::span<const int> e) { return cplx(e.size() == 1 ? 1.0 : 0.0); });
    const auto m1 = moments_from_cumulants(delta);
    for (SetFunction::Mask s = 1; s <= m1.full_mask(); ++s) CHECK(m1[s] == cplx(1.0));
  }
}

TEST_CASE("random round trips are exact to 1e-12 relative") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 7);
    const auto f = random_table(k, rng);
    const auto back = moments_from_cumulants(free_cumulant_table(f));
    const double scale = table_scale(f);
    for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) CHECK(std::abs(back[s] - f[s]) <= 1e-12 * scale);
  }
}

TEST_CASE("free cumulants of the semicircle moments") {
  // With every f_i = x the moment table is the Catalan sequence on even sizes
  // and the only nonvanishing free cumulant is the one on pairs.
  const auto f = SetFunction::from_function(6, [](std::span<const int> e) {
    const auto n = e.size();
    return cplx(n % 2 ? 0.0 : static_cast<double>(oracle::catalan(static_cast<unsigned>(n / 2))));
  });
  const auto c = free_cumulant_table(f);
  for (SetFunction::Mask s = 1; s <= c.full_mask(); ++s) CHECK(std::abs(c[s] - cplx(std::popcount(s) == 2 ? 1.0 : 0.0)) < 1e-12);
}

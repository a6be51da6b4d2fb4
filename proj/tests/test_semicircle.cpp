#include <algorithm>
#include <random>

#include "doctest.h"
#include "freelab/errors.hpp"
#include "freelab/ncp.hpp"
#include "freelab/semicircle.hpp"
#include "freelab/cumulants.hpp"
#include "oracles.hpp"

using namespace freelab;
using namespace std::complex_literals;

namespace {

std::vector<cplx> random_tuple(std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.05, 2.0);
  std::bernoulli_distribution flip(0.5);
  std::vector<cplx> z;
  for (std::size_t i = 0; i < k; ++i) z.emplace_back(re(rng), flip(rng) ? im(rng) : -im(rng));
  return z;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("semicircle density") {
  CHECK(rho_sc(0.0) == doctest::Approx(0.3183098862).epsilon(1e-10));
  CHECK(rho_sc(2.0) == 0.0);
  CHECK(rho_sc(-2.0) == 0.0);
  CHECK(rho_sc(2.5) == 0.0);
  CHECK(std::abs(sc_average([](double) { return cplx(1.0); }) - 1.0) < 1e-12);
}

TEST_CASE("semicircle moments and exponential average") {
  CHECK(std::abs(sc_average([](double x) { return cplx(x * x); }) - 1.0) < 1e-12);
  CHECK(std::abs(sc_average([](double x) { return cplx(x * x * x * x); }) - 2.0) < 1e-12);
  CHECK(std::abs(sc_average([](double x) { return std::exp(3.0i * x); }) - oracle::phi(3.0)) < 1e-12);
  const auto r = sc_integrate([](double x) { return cplx(std::pow(x, 6)); });
  CHECK(std::abs(r.value - 5.0) < 1e-12);
  CHECK(r.nodes_used >= 2000);
}

TEST_CASE("quadrature spec validation") {
  QuadratureSpec bad;
  bad.nodes = 4;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  QuadratureSpec tight;
  tight.max_nodes = tight.nodes;
  CHECK_THROWS_AS(sc_integrate([](double x) { return 1.0 / (x - cplx(0.0, 1e-6)); }, tight), AccuracyError);
}

TEST_CASE("Stieltjes transform values and branch") {
  CHECK(std::abs(stieltjes_m(1i) - 0.6180339887i) < 1e-10);
  CHECK(std::abs(stieltjes_m(2i) - 0.4142135624i) < 1e-10);
  CHECK(rel(stieltjes_m(100i), 0.01i) < 1e-4);
  CHECK_THROWS_AS(stieltjes_m(1.0), DomainError);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const cplx z = random_tuple(1, rng)[0];
    const cplx m = stieltjes_m(z);
    CHECK(m.imag() * z.imag() > 0);
    CHECK(std::abs(m) < 1.0);
    CHECK(std::abs(m * m + z * m + 1.0) < 1e-14);
    CHECK(std::abs(stieltjes_m(std::conj(z)) - std::conj(m)) < 1e-15);
    CHECK(std::abs(m - oracle::stieltjes(z)) < 1e-12);
  }
}

TEST_CASE("pair factor") {
  CHECK(std::abs(q_factor(1i, 1i) - (-0.2763932023)) < 1e-10);
  CHECK(q_factor(1i, 0.3 + 2i) == q_factor(0.3 + 2i, 1i));
  const cplx z1 = 0.4 + 0.7i, z2 = -1.1 + 0.3i;
  CHECK(rel(divided_difference_recursive(SpectralTuple({z1, z2})), q_factor(z1, z2)) < 1e-12);
  CHECK_THROWS_AS(q_from_m(1.0, 1.0), SingularityError);
}

TEST_CASE("spectral tuple invariants") {
  const SpectralTuple t({0.5 + 1i, -0.2 - 0.3i});
  CHECK(t.eta_star() == doctest::Approx(0.3));
  CHECK(t.rho() == doctest::Approx(std::max(std::abs(t.m(0).imag()), std::abs(t.m(1).imag())) / M_PI));
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(t.m(i) * t.m(i) + t.z(i) * t.m(i) + 1.0) <= 1e-12);
  CHECK_THROWS_AS(SpectralTuple({1.0}), DomainError);
  CHECK_THROWS_AS(SpectralTuple({3.5 + 1i}), DomainError);
  CHECK_THROWS_AS(SpectralTuple({cplx(0.0, 1e-12)}), DomainError);
  CHECK_THROWS_AS(SpectralTuple(std::vector<cplx>{}), ValidationError);
  CHECK(t.conjugate().z(1) == 0.3i - 0.2);
  CHECK(t.subtuple(0b10).z(0) == t.z(1));
}

TEST_CASE("divided differences: worked values") {
  const SpectralTuple one({1i});
  CHECK(divided_difference_recursive(one) == stieltjes_m(1i));
  CHECK(std::abs(divided_difference_quadrature(one) - stieltjes_m(1i)) < 1e-10);
  CHECK(divided_difference_graph(one) == stieltjes_m(1i));

  const SpectralTuple two({1i, 2i});
  CHECK(std::abs(divided_difference_recursive(two) - (-0.2038204263767997)) < 1e-10);
  CHECK(std::abs(divided_difference_quadrature(two) - divided_difference_recursive(two)) < 1e-10);
  CHECK(std::abs(divided_difference_graph(two) - two.q(0, 1)) < 1e-15);

  // Coincident pair against a central finite difference of m.
  const double h = 1e-6;
  const cplx fd = (stieltjes_m(1i + h) - stieltjes_m(1i - h)) / (2.0 * h);
  const cplx mm = divided_difference_recursive(SpectralTuple({1i, 1i}));
  CHECK(std::abs(mm - fd) < 1e-6);
  CHECK(std::abs(mm - (-0.2763932023)) < 1e-10);
}

TEST_CASE("three routes agree with the Lagrange oracle on random tuples") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 6);
    const auto z = random_tuple(k, rng);
    const SpectralTuple t(z);
    const cplx r = divided_difference_recursive(t);
    CHECK(rel(divided_difference_quadrature(t), r) < 1e-8);
    CHECK(rel(divided_difference_graph(t), r) < 1e-8);
    if (k <= 3) CHECK(rel(oracle::divided_difference(z), r) < 1e-8);
    // For a single point |m| exceeds |Im m| off the imaginary axis; the bound is for k >= 2.
    if (k >= 2) CHECK(std::abs(r) <= divided_difference_bound(t) * (1 + 1e-12));
  }
}

TEST_CASE("divided differences are symmetric under permutations") {
  std::mt19937_64 rng(3);
  auto z = random_tuple(5, rng);
  const SpectralTuple base(z);
  const cplx r0 = divided_difference_recursive(base), q0 = divided_difference_quadrature(base),
             g0 = divided_difference_graph(base);
  std::sort(z.begin(), z.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  do {
    const SpectralTuple t(z);
    CHECK(rel(divided_difference_recursive(t), r0) < 1e-10);
    CHECK(divided_difference_quadrature(t) == q0);
    CHECK(rel(divided_difference_graph(t), g0) < 1e-10);
  } while (std::next_permutation(z.begin(), z.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); }));
}

TEST_CASE("near-coincident parameters fall back to quadrature") {
  const SpectralTuple t({0.3 + 0.5i, 0.3 + 0.5i + 1e-6, -0.4 + 0.2i});
  const SpectralTuple t_exact({0.3 + 0.5i, 0.3 + 0.5i, -0.4 + 0.2i});
  CHECK(rel(divided_difference_recursive(t), divided_difference_recursive(t_exact)) < 1e-5);
  CHECK(divided_difference_recursive(t) == divided_difference_quadrature(t, QuadratureSpec{}));
}

TEST_CASE("coincident parameters use the Taylor coefficients") {
  for (std::size_t n = 1; n <= 6; ++n) {
    const SpectralTuple t(std::vector<cplx>(n, 0.2 + 0.6i));
    CHECK(rel(divided_difference_recursive(t), divided_difference_quadrature(t)) < 1e-9);
    CHECK(rel(divided_difference_graph(t), divided_difference_quadrature(t)) < 1e-9);
  }
}

TEST_CASE("quadrature accuracy guard") {
  const SpectralTuple t({0.1 + 1e-4i});
  CHECK_THROWS_AS(divided_difference_quadrature(t), DomainError);
  QuadratureSpec fine;
  fine.nodes = 1 << 15;
  fine.max_nodes = 1 << 20;
  CHECK(std::abs(divided_difference_quadrature(t, fine) - stieltjes_m(0.1 + 1e-4i)) < 1e-8);
}

TEST_CASE("connected-graph cumulants equal the Moebius inversion of the m table") {
  std::mt19937_64 rng(4);
  for (std::size_t k = 1; k <= 6; ++k) {
    const SpectralTuple t(random_tuple(k, rng));
    const auto table = SetFunction::from_function(k, [&](std::span<const int> e) {
      std::vector<cplx> sub;
      for (int i : e) sub.push_back(t.z(static_cast<std::size_t>(i - 1)));
      return divided_difference_recursive(SpectralTuple(sub));
    });
    const auto c = free_cumulant_table(table);
    for (SetFunction::Mask s = 1; s <= c.full_mask(); ++s)
      CHECK(std::abs(m_circ(t, s) - c[s]) <= 1e-10 * std::max(1.0, std::abs(c[s])));
  }
  const SpectralTuple t({1i, 2i});
  CHECK(std::abs(m_circ(t, 0b11) - (divided_difference_recursive(t) - t.m(0) * t.m(1))) < 1e-14);
  CHECK(m_circ(t, 0b01) == t.m(0));
}

TEST_CASE("Bessel function and kernels") {
  for (double x = -20.0; x <= 20.0; x += 0.37) CHECK(std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, std::abs(x)) * (x < 0 ? -1 : 1)) < 1e-12);
  for (double x = 20.0; x <= 200.0; x += 1.3) CHECK(std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)) < 1e-9);
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(bessel_j1(-3.7) == -bessel_j1(3.7));
  CHECK(phi(0.0) == 1.0);
  CHECK(phi(3.0) == doctest::Approx(std::cyl_bessel_j(1.0, 6.0) / 3.0).epsilon(1e-12));
  CHECK(theta(2.5) == doctest::Approx(std::cyl_bessel_j(1.0, 5.0) * std::sqrt(2.5)).epsilon(1e-12));
  CHECK_THROWS_AS(theta(-1.0), DomainError);
  for (double s = 0.0; s <= 50.0; s += 0.5)
    CHECK(std::abs(phi(s) - sc_average([s](double x) { return std::exp(1i * s * x); })) < 1e-8);
}

TEST_CASE("large-argument Bessel residual") {
  const double x = 50.0;
  const double direct = std::cyl_bessel_j(1.0, x) + std::cos(x + M_PI / 4) * std::sqrt(2.0 / (M_PI * x));
  CHECK(bessel_asymptotic_residual(x) == doctest::Approx(direct).epsilon(1e-6));
  for (double xs : {20.0, 50.0, 100.0}) CHECK(std::abs(bessel_asymptotic_residual(xs)) <= 5.0 * std::pow(xs, -1.5));
  CHECK_THROWS_AS(bessel_asymptotic_residual(0.0), DomainError);
}

TEST_CASE("graph generating polynomials") {
  const auto p2 = ncg_generating_polynomials(2);
  CHECK(p2.a == std::vector<std::int64_t>{1, 1});
  const auto p3 = ncg_generating_polynomials(3);
  CHECK(p3.a == std::vector<std::int64_t>{1, 3, 3, 1});
  CHECK(eval_polynomial(p3.a, 1.0) == cplx(8.0));
  CHECK(p3.b == std::vector<std::int64_t>{1});
  // a_n(1) counts all graphs.
  for (std::size_t n = 1; n <= 6; ++n)
    CHECK(eval_polynomial(ncg_generating_polynomials(n).a, 1.0) ==
          cplx(static_cast<double>(enumerate_ncg(GroundSet::first_n(static_cast<int>(n))).size())));
}

TEST_CASE("derivative identity") {
  const auto r = verify_derivative_identity(1i, 3);
  CHECK(r.residual <= 1e-8);
  CHECK(std::abs(r.quadrature_value - divided_difference_quadrature(SpectralTuple({1i, 1i, 1i}))) < 1e-15);
  for (std::size_t n = 1; n <= 8; ++n) CHECK(verify_derivative_identity(0.5 + 0.4i, n).residual <= 1e-8 * std::pow(0.4, 1.0 - n));
}

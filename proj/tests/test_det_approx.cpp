#include <random>

#include "doctest.h"
#include "freelab/det_approx.hpp"
#include "freelab/errors.hpp"
#include "oracles.hpp"

using namespace freelab;
using namespace std::complex_literals;

namespace {

Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = oracle::random_cplx(rng);
  return a;
}

std::vector<Matrix> random_matrices(std::size_t count, Eigen::Index n, std::mt19937_64& rng) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_matrix(n, rng));
  return out;
}

std::vector<cplx> random_z(std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-2.5, 2.5), im(0.1, 1.5);
  std::bernoulli_distribution flip(0.5);
  std::vector<cplx> z;
  for (std::size_t i = 0; i < k; ++i) z.emplace_back(re(rng), flip(rng) ? im(rng) : -im(rng));
  return z;
}

cplx tr(const Matrix& a) { return a.trace() / static_cast<double>(a.rows()); }

double rel_matrix(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

// m[z_S] through the Lagrange oracle.
cplx dd(const std::vector<cplx>& z, std::initializer_list<int> idx) {
  std::vector<cplx> sub;
  for (int i : idx) sub.push_back(z[static_cast<std::size_t>(i)]);
  return oracle::divided_difference(sub);
}

NonCrossingPartition P(const char* s) { return NonCrossingPartition::parse(s); }

}  // namespace

TEST_CASE("traces and chain validation") {
  std::mt19937_64 rng(1);
  const Matrix a = random_matrix(5, rng), b = random_matrix(5, rng);
  CHECK(std::abs(normalized_trace_product(a, b) - tr(a * b)) < 1e-13);
  CHECK(std::abs(normalized_trace(a) - tr(a)) < 1e-15);
  CHECK_THROWS_AS(ObservableChain({}), ValidationError);
  CHECK_THROWS_AS(ObservableChain({a, Matrix::Identity(4, 4)}), ValidationError);
  CHECK_THROWS_AS(ObservableChain({Matrix(2, 3)}), ValidationError);
  CHECK_THROWS_AS(ObservableChain({a}, Vector::Ones(5), Vector::Ones(4)), ValidationError);
  Matrix bad = a;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(ObservableChain({bad}), ValidationError);
  CHECK(ObservableChain({a, b}).size() == 2);
}

TEST_CASE("partial traces") {
  std::mt19937_64 rng(2);
  const auto a = random_matrices(3, 4, rng);
  const std::span<const Matrix> a2(a.data(), 2);
  CHECK(rel_matrix(partial_trace(P("1 2 3"), a2), a[0] * a[1]) < 1e-14);
  CHECK(rel_matrix(partial_trace(P("1|2|3"), a2), tr(a[0]) * tr(a[1]) * Matrix::Identity(4, 4)) < 1e-14);
  CHECK(rel_matrix(partial_trace(P("1 3|2"), a2), tr(a[1]) * a[0]) < 1e-14);
  CHECK(rel_matrix(partial_trace(P("1 2|3"), a2), tr(a[0] * a[1]) * Matrix::Identity(4, 4)) < 1e-14);
  CHECK(std::abs(pi_trace(P("1 3|2"), a) - tr(a[0] * a[2]) * tr(a[1])) < 1e-13);
  CHECK(std::abs(pi_trace(P("1 2 3"), a) - tr(a[0] * a[1] * a[2])) < 1e-13);
  CHECK_THROWS_AS(partial_trace(P("1 2 3 4"), a2), ValidationError);
}

TEST_CASE("M_[2] against the hand expansion") {
  std::mt19937_64 rng(3);
  const auto a = random_matrices(1, 5, rng);
  const std::vector<cplx> z = {0.3 + 0.8i, -1.2 - 0.4i};
  const SpectralTuple t(z);
  const cplx m1 = t.m(0), m2 = t.m(1);
  const Matrix expect = a[0] * m1 * m2 + tr(a[0]) * (dd(z, {0, 1}) - m1 * m2) * Matrix::Identity(5, 5);
  CHECK(rel_matrix(m_matrix_partition(t, a).matrix, expect) < 1e-12);
  CHECK(rel_matrix(m_matrix_graph(t, a).matrix, expect) < 1e-12);
  CHECK(rel_matrix(m_matrix_recursive(t, a).matrix, expect) < 1e-12);
  CHECK(m_matrix_graph(t, a).terms.size() == 2);
  // Recursion base: m_1 (A_1 m_2 + q_12 <A_1> m_2).
  const Matrix base = m1 * (a[0] * m2 + t.q(0, 1) * tr(a[0]) * m2 * Matrix::Identity(5, 5));
  CHECK(rel_matrix(base, expect) < 1e-12);
}

TEST_CASE("M_[3] against its five terms") {
  std::mt19937_64 rng(4);
  const auto a = random_matrices(2, 4, rng);
  const std::vector<cplx> z = {0.5 + 0.6i, -0.7 + 1.1i, 1.4 - 0.3i};
  const SpectralTuple t(z);
  const cplx m1 = t.m(0), m2 = t.m(1), m3 = t.m(2);
  const cplx c12 = dd(z, {0, 1}) - m1 * m2, c13 = dd(z, {0, 2}) - m1 * m3, c23 = dd(z, {1, 2}) - m2 * m3;
  const cplx c123 = dd(z, {0, 1, 2}) - dd(z, {0, 1}) * m3 - dd(z, {0, 2}) * m2 - dd(z, {1, 2}) * m1 + 2.0 * m1 * m2 * m3;
  const Matrix I = Matrix::Identity(4, 4);
  const Matrix expect = a[0] * a[1] * m1 * m2 * m3 + tr(a[0]) * a[1] * c12 * m3 + tr(a[0] * a[1]) * I * c13 * m2 +
                        tr(a[1]) * a[0] * m1 * c23 + tr(a[0]) * tr(a[1]) * I * c123;
  CHECK(rel_matrix(m_matrix_partition(t, a).matrix, expect) < 1e-11);
  CHECK(m_matrix_partition(t, a).terms.size() == 5);
}

TEST_CASE("identity observables collapse to the divided difference") {
  std::mt19937_64 rng(5);
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto z = random_z(k, rng);
    const SpectralTuple t(z);
    const std::vector<Matrix> ids(k - 1, Matrix::Identity(3, 3));
    const cplx d = divided_difference_recursive(t);
    if (k == 1) continue;
    CHECK(rel_matrix(m_matrix_partition(t, ids).matrix, d * Matrix::Identity(3, 3)) < 1e-10);
    CHECK(rel_matrix(m_matrix_graph(t, ids).matrix, divided_difference_graph(t) * Matrix::Identity(3, 3)) < 1e-12);
  }
}

TEST_CASE("three constructions of M_[k] agree and the trace recursion holds") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 5);
    const Eigen::Index n = 2 + trial % 6;
    const SpectralTuple t(random_z(k, rng));
    const auto a = random_matrices(k - 1, n, rng);
    const Matrix p = m_matrix_partition(t, a).matrix;
    CHECK(rel_matrix(m_matrix_graph(t, a).matrix, p) < 1e-10);
    CHECK(rel_matrix(m_matrix_recursive(t, a, RecursionLine::expand_first).matrix, p) < 1e-10);
    CHECK(rel_matrix(m_matrix_recursive(t, a, RecursionLine::expand_last).matrix, p) < 1e-10);
    CHECK(check_trace_recursion(t, a).residual <= 1e-9);
    const Matrix ak = random_matrix(n, rng);
    std::vector<Matrix> all = a;
    all.push_back(ak);
    CHECK(std::abs(m_averaged(t, all).value - tr(p * ak)) <= 1e-10 * std::max(1.0, std::abs(tr(p * ak))));
  }
}

TEST_CASE("trace recursion guards") {
  std::mt19937_64 rng(7);
  const auto a = random_matrices(1, 3, rng);
  CHECK_THROWS_AS(check_trace_recursion(SpectralTuple({1i, 1i}), a), DomainError);
  CHECK_THROWS_AS(check_trace_recursion(SpectralTuple({1i}), {}), ValidationError);
}

TEST_CASE("size caps") {
  std::mt19937_64 rng(8);
  const auto a = random_matrices(6, 2, rng);
  const SpectralTuple t(random_z(7, rng));
  CHECK_THROWS_AS(m_matrix_graph(t, a), SizeLimitError);
}

TEST_CASE("function-level prediction for k = 2") {
  std::mt19937_64 rng(9);
  const auto a = random_matrices(2, 4, rng);
  const std::vector<ScalarFunction> f = {[](double x) { return std::exp(0.7i * x) + x * x; },
                                         [](double x) { return cplx(std::cos(x), x); }};
  const cplx f1 = oracle::sc_average(f[0]), f2 = oracle::sc_average(f[1]);
  const cplx f12 = oracle::sc_average([&](double x) { return f[0](x) * f[1](x); });
  const cplx expect_av = tr(a[0] * a[1]) * f1 * f2 + tr(a[0]) * tr(a[1]) * (f12 - f1 * f2);
  CHECK(std::abs(f_prediction(f, a).value - expect_av) < 1e-10);

  const Vector x = Vector::Random(4), y = Vector::Random(4);
  const cplx expect_iso = x.dot(a[0] * y) * f1 * f2 + tr(a[0]) * x.dot(y) * (f12 - f1 * f2);
  CHECK(std::abs(f_prediction_isotropic(f, std::span<const Matrix>(a.data(), 1), x, y).value - expect_iso) < 1e-10);
}

TEST_CASE("exponential prediction") {
  std::mt19937_64 rng(10);
  const auto a = random_matrices(2, 5, rng);
  CHECK(std::abs(exp_prediction(std::vector<double>{0.0, 0.0}, a).value - tr(a[0] * a[1])) < 1e-13);
  const double s1 = 2.3, s2 = -0.9;
  const cplx expect = tr(a[0] * a[1]) * oracle::phi(s1) * oracle::phi(s2) +
                      tr(a[0]) * tr(a[1]) * (oracle::phi(s1 + s2) - oracle::phi(s1) * oracle::phi(s2));
  CHECK(std::abs(exp_prediction(std::vector<double>{s1, s2}, a).value - expect) < 1e-12);
  const std::vector<ScalarFunction> f = {[=](double x) { return std::exp(1i * s1 * x); },
                                         [=](double x) { return std::exp(1i * s2 * x); }};
  CHECK(std::abs(f_prediction(f, a).value - expect) < 1e-10);
  const std::vector<ScalarFunction> g = {[](double x) { return std::exp(3i * x); }};
  const std::vector<Matrix> id = {Matrix::Identity(2, 2)};
  CHECK(std::abs(f_prediction(g, id).value - std::cyl_bessel_j(1.0, 6.0) / 3.0) < 1e-12);
}

TEST_CASE("large-time forms") {
  std::mt19937_64 rng(11);
  const auto a = random_matrices(3, 6, rng);
  const Matrix a0 = traceless_part(a[0]);
  CHECK(std::abs(tr(a0)) < 1e-14);
  for (double t : {0.5, 3.0, 12.0}) {
    const cplx expect = tr(a[0]) * tr(a[1]) +
                        std::pow(std::cyl_bessel_j(1.0, 2 * t), 2) * t / std::pow(t, 3) *
                            tr(traceless_part(a[0]) * traceless_part(a[1]));
    CHECK(std::abs(two_observable_asymptotic(t, a[0], a[1]) - expect) < 1e-12);
    // The two-point prediction is exactly this form.
    CHECK(std::abs(exp_prediction(std::vector<double>{t, -t}, std::span<const Matrix>(a.data(), 2)).value - expect) <
          1e-12);
  }
  CHECK_THROWS_AS(two_observable_asymptotic(0.0, a[0], a[1]), DomainError);
  const Vector x = Vector::Random(6), y = Vector::Random(6);
  const double t = 4.0;
  const cplx iso = x.dot(y) * tr(a[0]) + oracle::phi(t) * oracle::phi(t) * x.dot(traceless_part(a[0]) * y);
  CHECK(std::abs(two_observable_asymptotic_isotropic(t, a[0], x, y) - iso) < 1e-12);

  const double s = 5.0, tt = 10.0;
  const auto five = three_observable_asymptotic(tt, s, a[0], a[1], a[2]);
  const Matrix b0 = traceless_part(a[1]), c0 = traceless_part(a[2]);
  CHECK(std::abs(five.product - tr(a[0]) * tr(a[1]) * tr(a[2])) < 1e-12);
  CHECK(std::abs(five.s_term - oracle::phi(s) * oracle::phi(s) * tr(a[0]) * tr(b0 * c0)) < 1e-12);
  CHECK(std::abs(five.t_term - oracle::phi(tt) * oracle::phi(tt) * tr(a[1]) * tr(a0 * c0)) < 1e-12);
  CHECK(std::abs(five.gap_term - oracle::phi(tt - s) * oracle::phi(tt - s) * tr(a[2]) * tr(a0 * b0)) < 1e-12);
  CHECK(std::abs(five.triple_term - oracle::phi(s) * oracle::phi(tt) * oracle::phi(tt - s) * tr(a0 * b0 * c0)) < 1e-12);
  CHECK(std::abs(five.value - (five.product + five.s_term + five.t_term + five.gap_term + five.triple_term)) < 1e-14);
  CHECK_THROWS_AS(three_observable_asymptotic(5.0, 5.0, a[0], a[1], a[2]), DomainError);
  CHECK_THROWS_AS(three_observable_asymptotic(5.0, 0.0, a[0], a[1], a[2]), DomainError);
}

TEST_CASE("bound diagnostics are finite and scale-free") {
  std::mt19937_64 rng(12);
  const auto a = random_matrices(2, 4, rng);
  const SpectralTuple t({0.2 + 0.5i, -0.3 + 0.5i});
  const auto r = m_bound_check(t, a, 0);
  CHECK(std::isfinite(r.averaged_ratio));
  CHECK(std::isfinite(r.norm_ratio));
  CHECK(r.eta_star == doctest::Approx(0.5));
  std::vector<Matrix> scaled = {2.0 * a[0], a[1]};
  CHECK(m_bound_check(t, scaled, 0).norm_ratio == doctest::Approx(r.norm_ratio).epsilon(1e-10));
  CHECK(operator_norm(Matrix::Identity(3, 3) * 2.0) == doctest::Approx(2.0));
}

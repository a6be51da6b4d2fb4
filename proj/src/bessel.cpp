#include <cmath>
#include <numbers>

#include "freelab/errors.hpp"
#include "freelab/semicircle.hpp"

namespace freelab {

namespace {

// Above this the Hankel expansion's smallest term is below ~1e-14, while the
// series still keeps ~1e-13 absolute accuracy in long double.
constexpr double kSeriesLimit = 16.0;

long double j1_series(long double x) {
  const long double half = x / 2;
  const long double q = -half * half;
  long double term = half;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + 1));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return sum;
}

// J1(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - 3pi/4, with the
// asymptotic P, Q series truncated at their smallest term.
long double j1_asymptotic(long double x) {
  constexpr long double mu = 4.0L;
  long double p = 0, q = 0;
  long double term = 1;
  long double last = INFINITY;
  for (int k = 0; k < 200; ++k) {
    if (std::fabs(term) > last) break;
    last = std::fabs(term);
    const int sign = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 0) p += sign * term;
    else q += sign * term;
    const long double odd = 2.0L * k + 1;
    term *= (mu - odd * odd) / ((k + 1) * 8.0L * x);
  }
  const long double chi = x - 3.0L * std::numbers::pi_v<long double> / 4;
  return std::sqrt(2.0L / (std::numbers::pi_v<long double> * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j1(double x) {
  const long double ax = std::fabs(static_cast<long double>(x));
  const long double v = ax <= kSeriesLimit ? j1_series(ax) : j1_asymptotic(ax);
  return static_cast<double>(x < 0 ? -v : v);
}

double phi(double s) {
  if (s == 0.0) return 1.0;
  return bessel_j1(2.0 * s) / s;
}

double theta(double t) {
  if (t < 0.0) throw DomainError("theta(t) is defined for t >= 0");
  return bessel_j1(2.0 * t) * std::sqrt(t);
}

double bessel_asymptotic_residual(double x) {
  if (!(x > 0.0)) throw DomainError("Bessel asymptotic form needs x > 0");
  return bessel_j1(x) - std::sqrt(2.0 / (M_PI * x)) * std::cos(x - 0.75 * M_PI);
}

}  // namespace freelab

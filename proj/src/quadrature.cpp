#include <cmath>
#include <numbers>
#include <string>

#include "freelab/errors.hpp"
#include "freelab/semicircle.hpp"

namespace freelab {

double rho_sc(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

void QuadratureSpec::validate() const {
  if (nodes < 8) throw ValidationError("quadrature node count must be at least 8");
  if (max_nodes < nodes) throw ValidationError("quadrature max_nodes is below nodes");
  if (!(rel_tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");
}

namespace {

// With x = 2 cos(theta), int f rho_sc dx = (2/pi) int_0^pi f(2cos) sin^2 dtheta,
// and the periodic trapezoid rule on n panels gives (2/n) sum_{i=1}^{n-1}.
// Returns the raw sum over i = first, first+step, ... < n together with the
// matching sum of |f| sin^2.
struct PartialSum {
  cplx sum;
  double abs_sum = 0.0;
};

PartialSum level_sum(const std::function<cplx(double)>& f, std::size_t n, std::size_t first, std::size_t step) {
  PartialSum out;
  const double h = std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = first; i < n; i += step) {
    const double th = h * static_cast<double>(i);
    const double s = std::sin(th);
    const cplx v = f(2.0 * std::cos(th));
    out.sum += s * s * v;
    out.abs_sum += s * s * std::abs(v);
  }
  return out;
}

}  // namespace

QuadratureResult sc_integrate(const std::function<cplx(double)>& f, const QuadratureSpec& spec) {
  spec.validate();
  std::size_t n = spec.nodes;
  PartialSum acc = level_sum(f, n, 1, 1);
  cplx previous = 2.0 * acc.sum / static_cast<double>(n);

  while (2 * n <= spec.max_nodes) {
    const PartialSum fresh = level_sum(f, 2 * n, 1, 2);
    acc.sum += fresh.sum;
    acc.abs_sum += fresh.abs_sum;
    n *= 2;
    const cplx current = 2.0 * acc.sum / static_cast<double>(n);
    const double l1 = 2.0 * acc.abs_sum / static_cast<double>(n);
    const double change = std::abs(current - previous);
    if (!std::isfinite(change)) throw AccuracyError("quadrature produced a non-finite value");
    if (change <= spec.rel_tol * std::abs(current) + 64.0 * 2.2e-16 * l1) return {current, n, change};
    previous = current;
  }
  throw AccuracyError("quadrature did not converge within " + std::to_string(spec.max_nodes) + " nodes");
}

cplx sc_average(const std::function<cplx(double)>& f, const QuadratureSpec& spec) {
  return sc_integrate(f, spec).value;
}

}  // namespace freelab

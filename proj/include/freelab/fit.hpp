#pragma once

// Least-squares line fits, power-law fits on log-log axes, and the envelope
// fit used for oscillatory decays.

#include <cstddef>
#include <span>
#include <vector>

namespace freelab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;  // zero when only two points are fitted
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope x + intercept. Throws ValidationError for
/// fewer than two points, mismatched lengths or constant x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fits log y = slope log x + intercept. Throws ValidationError on
/// non-positive data.
LinearFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// Indices i of strict interior local maxima: v[i-1] < v[i] >= v[i+1].
std::vector<std::size_t> local_maxima(std::span<const double> v);

struct EnvelopeFit {
  LinearFit fit;
  std::vector<double> t;      // abscissae of the retained maxima
  std::vector<double> value;  // |value| at those maxima
  std::size_t rejected = 0;   // maxima dropped as unresolved
};

/// Extracts local maxima of |value| over the grid, keeps the leading run of
/// maxima exceeding `resolution * noise[i]` (noise may be empty), and fits a
/// power law to them. Maxima after the first unresolved one are rejected.
EnvelopeFit fit_envelope(std::span<const double> t, std::span<const double> abs_value, std::span<const double> noise,
                         double resolution);

}  // namespace freelab

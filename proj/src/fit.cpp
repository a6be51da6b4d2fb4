#include "freelab/fit.hpp"

#include <cmath>

#include "freelab/errors.hpp"

namespace freelab {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("fit: x and y have different lengths");
  if (x.size() < 2) throw ValidationError("fit: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("fit: abscissae are all equal");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    rss += r * r;
  }
  f.r_squared = syy > 0 ? 1.0 - rss / syy : 1.0;
  if (x.size() > 2) f.slope_std_error = std::sqrt(rss / (n - 2.0) / sxx);
  return f;
}

LinearFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("power-law fit: x and y have different lengths");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("power-law fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

std::vector<std::size_t> local_maxima(std::span<const double> v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i - 1] < v[i] && v[i] >= v[i + 1]) out.push_back(i);
  return out;
}

EnvelopeFit fit_envelope(std::span<const double> t, std::span<const double> abs_value, std::span<const double> noise,
                         double resolution) {
  if (t.size() != abs_value.size()) throw ValidationError("envelope fit: grid and values differ in length");
  if (!noise.empty() && noise.size() != t.size()) throw ValidationError("envelope fit: noise has the wrong length");
  EnvelopeFit e;
  // The envelope decays, so once one maximum sinks into the noise every later
  // maximum that clears the threshold is a noise excursion.
  bool resolved = true;
  for (std::size_t i : local_maxima(abs_value)) {
    if (!noise.empty() && abs_value[i] <= resolution * noise[i]) resolved = false;
    if (!resolved) {
      ++e.rejected;
      continue;
    }
    e.t.push_back(t[i]);
    e.value.push_back(abs_value[i]);
  }
  e.fit = fit_power_law(e.t, e.value);
  return e;
}

}  // namespace freelab

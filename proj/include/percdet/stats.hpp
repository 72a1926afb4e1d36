#ifndef PERCDET_STATS_HPP
#define PERCDET_STATS_HPP

#include <cmath>
#include <cstddef>
#include <span>

#include "percdet/error.hpp"

namespace percdet {

/// Two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95) {
  if (trials == 0) throw InvalidArgument("wilson_interval: trials must be > 0");
  if (successes > trials) throw InvalidArgument("wilson_interval: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  const double low = successes == 0 ? 0.0 : std::fmax(0.0, center - half);
  const double high = successes == trials ? 1.0 : std::fmin(1.0, center + half);
  return {low, high};
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares line y = intercept + slope * x with weighted R^2.
inline LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size()) throw InvalidArgument("weighted_linear_fit: length mismatch");
  LinearFit fit;
  fit.points = x.size();
  if (x.size() < 2) return fit;
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * dy;
    syy += w[i] * dy * dy;
  }
  if (sxx <= 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace percdet

#endif  // PERCDET_STATS_HPP

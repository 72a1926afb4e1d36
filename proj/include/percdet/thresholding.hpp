#ifndef PERCDET_THRESHOLDING_HPP
#define PERCDET_THRESHOLDING_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "percdet/error.hpp"
#include "percdet/model.hpp"
#include "percdet/noise_model.hpp"
#include "percdet/raster.hpp"

namespace percdet {

/// Literature estimate of the site-percolation threshold on Z^2.
inline constexpr double kSitePercolationThreshold = 0.592746;

enum class ThresholdRule { Eq10, Eq11, Manual };

inline const char* to_string(ThresholdRule rule) {
  switch (rule) {
    case ThresholdRule::Eq10: return "eq10";
    case ThresholdRule::Eq11: return "eq11";
    case ThresholdRule::Manual: return "manual";
  }
  return "?";
}

inline ThresholdRule threshold_rule_from_string(const std::string& s) {
  if (s == "eq10") return ThresholdRule::Eq10;
  if (s == "eq11") return ThresholdRule::Eq11;
  if (s == "manual") return ThresholdRule::Manual;
  throw InvalidArgument("unknown threshold rule '" + s + "'");
}

struct ThresholdConfig {
  double p_c_site = kSitePercolationThreshold;
  ThresholdRule rule = ThresholdRule::Eq10;
  std::optional<double> manual_theta;
  /// Step of the coarse scan used by the Eq10 rule.
  double grid_resolution = 1e-4;

  void validate() const {
    if (!(p_c_site > 0.0 && p_c_site < 1.0)) throw InvalidArgument("p_c_site must lie in (0,1)");
    if (!(grid_resolution > 0.0) || !std::isfinite(grid_resolution))
      throw InvalidArgument("grid_resolution must be > 0");
    if (rule == ThresholdRule::Manual && (!manual_theta || !std::isfinite(*manual_theta)))
      throw InvalidArgument("manual threshold rule needs a finite manual_theta");
  }
};

struct FeasibleInterval {
  double low = 0.0;
  double high = 0.0;
  double length() const noexcept { return high - low; }
  bool contains(double theta) const noexcept { return low < theta && theta < high; }
};

struct ThresholdSelection {
  double theta = 0.0;
  /// Probability that a background pixel turns black.
  double p_out = 0.0;
  /// Probability that an object pixel turns black.
  double p_im = 0.0;
  /// Absent for a manual threshold under infeasible noise.
  std::optional<FeasibleInterval> feasible_interval;
  double objective_value = 0.0;
  double alpha0 = 0.0;
  ThresholdRule rule = ThresholdRule::Eq10;
};

/// Smallest theta with P0(Y >= theta) <= alpha0.
inline double theta_from_alpha0(const NoiseModel& model, double alpha0) {
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw InvalidArgument("alpha0 must lie in (0,1)");
  const double theta = model.noise_quantile(1.0 - alpha0);
  if (!std::isfinite(theta))
    throw InfeasibleNoise("noise quantile undefined at 1 - alpha0", theta, theta);
  return theta;
}

/// Open interval of thresholds that make the background subcritical
/// (p_out < p_c) and the object supercritical (p_im > p_c).
inline FeasibleInterval feasible_interval(const NoiseModel& model, const ThresholdConfig& cfg) {
  cfg.validate();
  const double q = 1.0 - cfg.p_c_site;
  // p_out < p_c  <=>  G(theta) > q  <=>  theta > inf{x : G(x) > q}
  const double low = model.noise_upper_quantile(q);
  // p_im > p_c   <=>  G(theta - 1) < q  <=>  theta < 1 + inf{x : G(x) >= q}
  const double high = 1.0 + model.noise_quantile(q);
  if (!(low < high) || !std::isfinite(low) || !std::isfinite(high))
    throw InfeasibleNoise("noise level is not 1-small: no threshold satisfies both percolation constraints",
                          low, high);
  return {low, high};
}

/// Squared distances of both black-probabilities from p_c.
inline double eq10_objective(const NoiseModel& model, double theta, double p_c) {
  const double a = p0_tail(model, theta) - p_c;
  const double b = (1.0 - p1_cdf(model, theta)) - p_c;
  return a * a + b * b;
}

/// eq10_objective minus its saturated value p_c^2 + (1 - p_c)^2, written in the
/// small tail probabilities so it keeps relative precision when both
/// black-probabilities are within rounding of 0 and 1.
inline double eq10_excess(const NoiseModel& model, double theta, double p_c) {
  const double u = p0_tail(model, theta);
  const double v = p1_cdf(model, theta);
  return u * (u - 2.0 * p_c) + v * (v - 2.0 * (1.0 - p_c));
}

inline double eq11_objective(const NoiseModel& model, double theta, double p_c) {
  auto sign = [](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); };
  return sign((1.0 - p1_cdf(model, theta)) - p_c) + sign(p_c - p0_tail(model, theta));
}

namespace detail {

inline ThresholdSelection make_selection(const NoiseModel& model, const ThresholdConfig& cfg, double theta,
                                         std::optional<FeasibleInterval> interval, double objective) {
  ThresholdSelection s;
  s.theta = theta;
  s.p_out = p0_tail(model, theta);
  s.p_im = 1.0 - p1_cdf(model, theta);
  s.feasible_interval = interval;
  s.objective_value = objective;
  s.alpha0 = s.p_out;
  s.rule = cfg.rule;
  return s;
}

}  // namespace detail

/// Maximizer of the Eq10 objective inside the feasible interval: coarse scan,
/// then golden-section refinement around the best grid point.
inline ThresholdSelection select_theta_eq10(const NoiseModel& model, const ThresholdConfig& cfg) {
  const FeasibleInterval interval = feasible_interval(model, cfg);
  const double h = cfg.grid_resolution;
  const double pc = cfg.p_c_site;
  auto f = [&](double t) { return eq10_excess(model, t, pc); };

  const double lo = interval.low + h;
  const double hi = interval.high - h;
  if (!(lo < hi)) {
    const double mid = 0.5 * (interval.low + interval.high);
    ThresholdConfig c = cfg;
    c.rule = ThresholdRule::Eq10;
    return detail::make_selection(model, c, mid, interval, eq10_objective(model, mid, pc));
  }

  const auto steps = static_cast<std::int64_t>(std::floor((hi - lo) / h));
  double best_t = lo;
  double best_f = f(lo);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double t = lo + static_cast<double>(k) * h;
    const double v = f(t);
    if (v > best_f) {
      best_f = v;
      best_t = t;
    }
  }

  double a = std::max(lo, best_t - h);
  double b = std::min(hi, best_t + h);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-8) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  const double refined = 0.5 * (a + b);
  const double refined_f = f(refined);
  if (refined_f >= best_f) {
    best_t = refined;
    best_f = refined_f;
  }
  ThresholdConfig c = cfg;
  c.rule = ThresholdRule::Eq10;
  return detail::make_selection(model, c, best_t, interval, eq10_objective(model, best_t, pc));
}

/// The Eq11 objective is 2 on the whole feasible interval; its midpoint is returned.
inline ThresholdSelection select_theta_eq11(const NoiseModel& model, const ThresholdConfig& cfg) {
  const FeasibleInterval interval = feasible_interval(model, cfg);
  ThresholdConfig c = cfg;
  c.rule = ThresholdRule::Eq11;
  return detail::make_selection(model, c, 0.5 * (interval.low + interval.high), interval, 2.0);
}

/// Threshold selection used by the detector: dispatch on cfg.rule.
inline ThresholdSelection select_theta(const NoiseModel& model, const ThresholdConfig& cfg) {
  cfg.validate();
  switch (cfg.rule) {
    case ThresholdRule::Eq10: return select_theta_eq10(model, cfg);
    case ThresholdRule::Eq11: return select_theta_eq11(model, cfg);
    case ThresholdRule::Manual: break;
  }
  std::optional<FeasibleInterval> interval;
  try {
    interval = feasible_interval(model, cfg);
  } catch (const InfeasibleNoise&) {
  }
  const double theta = *cfg.manual_theta;
  return detail::make_selection(model, cfg, theta, interval, eq10_objective(model, theta, cfg.p_c_site));
}

/// Black (1) iff Y >= theta.
inline BinaryImage apply_threshold(const GrayImage& img, double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("apply_threshold: theta must be finite");
  std::vector<std::uint8_t> bits(img.size());
  const auto y = img.values();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = y[i] >= theta ? 1 : 0;
  return BinaryImage(img.width(), img.height(), std::move(bits));
}

}  // namespace percdet

#endif  // PERCDET_THRESHOLDING_HPP

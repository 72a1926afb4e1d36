#ifndef PERCDET_LAB_HPP
#define PERCDET_LAB_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "percdet/cluster.hpp"
#include "percdet/crossing.hpp"
#include "percdet/error.hpp"
#include "percdet/model.hpp"
#include "percdet/parallel.hpp"
#include "percdet/random.hpp"
#include "percdet/raster.hpp"
#include "percdet/stats.hpp"
#include "percdet/thresholding.hpp"

namespace percdet {

// Monte Carlo laboratory. Trial t of an experiment with master seed s always
// uses derive_seed(s, t); aggregation runs in trial order.

struct PercolationSample {
  std::size_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  BinaryImage grid;
};

namespace detail {

inline void check_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument(std::string(what) + ": p must lie in (0,1)");
}

inline void fill_lattice(std::vector<std::uint8_t>& bits, std::size_t sites, double p, std::uint64_t seed) {
  const CounterStream stream(seed);
  bits.resize(sites);
  for (std::size_t i = 0; i < sites; ++i) bits[i] = stream.bernoulli(i, p) ? 1 : 0;
}

}  // namespace detail

/// n x n site percolation: each site open (black) independently with probability p.
inline PercolationSample sample_lattice(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample_lattice: n must be >= 1");
  detail::check_probability(p, "sample_lattice");
  std::vector<std::uint8_t> bits;
  detail::fill_lattice(bits, n * n, p, seed);
  return {n, p, seed, BinaryImage(n, n, std::move(bits))};
}

struct TailOptions {
  double p_c_site = kSitePercolationThreshold;
  /// Sizes outside [fit_min, fit_max] are estimated but excluded from the fit.
  std::size_t fit_min = 1;
  std::size_t fit_max = std::numeric_limits<std::size_t>::max();
  std::size_t min_successes = 5;
};

struct TailEstimate {
  std::size_t n = 0;
  double p = 0.0;
  std::size_t trials = 0;
  std::vector<std::size_t> thresholds;
  /// Cluster of the center site.
  std::vector<std::size_t> origin_counts;
  std::vector<double> survival;
  std::vector<double> log_survival;
  std::vector<double> confidence;
  /// Largest cluster anywhere on the screen.
  std::vector<std::size_t> screen_counts;
  std::vector<double> screen_survival;
  std::vector<double> screen_confidence;
  /// Decay rate: minus the slope of the weighted fit of log_survival on size.
  double fitted_rate = 0.0;
  LinearFit fit;
};

/// Survival of the center-site cluster size and of the screen maximum, with
/// an exponential-decay fit on the center-site curve.
inline TailEstimate estimate_cluster_tail(std::size_t n, double p, std::size_t trials,
                                          std::vector<std::size_t> sizes, std::uint64_t seed,
                                          const TailOptions& options = {}) {
  if (n < 1) throw InvalidArgument("estimate_cluster_tail: n must be >= 1");
  detail::check_probability(p, "estimate_cluster_tail");
  if (trials < 100) throw InvalidArgument("estimate_cluster_tail: trials must be >= 100");
  if (sizes.empty()) throw InvalidArgument("estimate_cluster_tail: sizes must be non-empty");
  if (!(p < options.p_c_site))
    throw InvalidRegime("estimate_cluster_tail: p must be subcritical (p < p_c_site)");
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  struct Outcome {
    std::size_t origin = 0;
    std::size_t screen = 0;
  };
  struct Scratch {
    std::vector<std::uint8_t> bits;
    std::vector<std::size_t> sizes;
    ClusterScanner scanner;
  };
  const std::size_t center = (n / 2) * n + n / 2;
  const auto outcomes = run_trials<Outcome, Scratch>(trials, [&](std::size_t t, Scratch& s) {
    detail::fill_lattice(s.bits, n * n, p, derive_seed(seed, t));
    s.sizes.assign(1, 0);
    s.scanner.scan(
        s.bits, n, n,
        [&](std::int32_t label, std::size_t) {
          if (static_cast<std::size_t>(label) == s.sizes.size()) s.sizes.push_back(0);
          ++s.sizes[static_cast<std::size_t>(label)];
          return true;
        },
        [](std::int32_t) {});
    Outcome o;
    o.origin = s.sizes[static_cast<std::size_t>(s.scanner.labels()[center])];
    o.screen = *std::max_element(s.sizes.begin(), s.sizes.end());
    return o;
  });

  TailEstimate est;
  est.n = n;
  est.p = p;
  est.trials = trials;
  est.thresholds = sizes;
  const double nt = static_cast<double>(trials);
  for (std::size_t size : sizes) {
    std::size_t origin = 0;
    std::size_t screen = 0;
    for (const Outcome& o : outcomes) {
      origin += o.origin >= size;
      screen += o.screen >= size;
    }
    const double ps = static_cast<double>(origin) / nt;
    const double qs = static_cast<double>(screen) / nt;
    est.origin_counts.push_back(origin);
    est.survival.push_back(ps);
    est.log_survival.push_back(origin > 0 ? std::log(ps) : -std::numeric_limits<double>::infinity());
    est.confidence.push_back(std::sqrt(ps * (1.0 - ps) / nt));
    est.screen_counts.push_back(screen);
    est.screen_survival.push_back(qs);
    est.screen_confidence.push_back(std::sqrt(qs * (1.0 - qs) / nt));
  }

  // Inverse delta-method variance of ln(p-hat): w = trials * p / (1 - p).
  std::vector<double> xs, ys, ws;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] < options.fit_min || sizes[k] > options.fit_max) continue;
    if (est.origin_counts[k] < options.min_successes || est.origin_counts[k] == trials) continue;
    xs.push_back(static_cast<double>(sizes[k]));
    ys.push_back(est.log_survival[k]);
    ws.push_back(nt * est.survival[k] / (1.0 - est.survival[k]));
  }
  est.fit = weighted_linear_fit(xs, ys, ws);
  est.fitted_rate = std::max(0.0, -est.fit.slope);
  return est;
}

struct CrossingStats {
  std::size_t n = 0;
  double p = 0.0;
  std::size_t trials = 0;
  double crossing_rate = 0.0;
  Interval crossing_interval;
  double disjoint_count_mean = 0.0;
  std::size_t disjoint_count_min = 0;
  std::size_t disjoint_count_max = 0;
};

/// Left-right crossing probability and number of vertex-disjoint crossings of
/// an n x n box in the supercritical phase.
inline CrossingStats estimate_crossings(std::size_t n, double p, std::size_t trials, std::uint64_t seed,
                                        double p_c_site = kSitePercolationThreshold) {
  if (n < 1) throw InvalidArgument("estimate_crossings: n must be >= 1");
  detail::check_probability(p, "estimate_crossings");
  if (trials < 100) throw InvalidArgument("estimate_crossings: trials must be >= 100");
  if (!(p > p_c_site)) throw InvalidRegime("estimate_crossings: p must be supercritical (p > p_c_site)");

  struct Outcome {
    bool crossed = false;
    std::size_t disjoint = 0;
  };
  struct Scratch {};
  const auto outcomes = run_trials<Outcome, Scratch>(trials, [&](std::size_t t, Scratch&) {
    const PercolationSample sample = sample_lattice(n, p, derive_seed(seed, t));
    return Outcome{has_left_right_crossing(sample.grid), max_disjoint_crossings(sample.grid)};
  });

  CrossingStats stats;
  stats.n = n;
  stats.p = p;
  stats.trials = trials;
  std::size_t crossed = 0;
  std::size_t total = 0;
  stats.disjoint_count_min = std::numeric_limits<std::size_t>::max();
  for (const Outcome& o : outcomes) {
    crossed += o.crossed;
    total += o.disjoint;
    stats.disjoint_count_min = std::min(stats.disjoint_count_min, o.disjoint);
    stats.disjoint_count_max = std::max(stats.disjoint_count_max, o.disjoint);
  }
  stats.crossing_rate = static_cast<double>(crossed) / static_cast<double>(trials);
  stats.crossing_interval = wilson_interval(crossed, trials);
  stats.disjoint_count_mean = static_cast<double>(total) / static_cast<double>(trials);
  return stats;
}

namespace detail {

/// Largest black cluster of each seeded synthetic image under a fixed threshold.
inline std::vector<std::size_t> largest_clusters(const TrueImage& truth, const NoiseModel& model, double theta,
                                                 std::size_t trials, std::uint64_t seed) {
  struct Scratch {
    ClusterScanner scanner;
  };
  return run_trials<std::size_t, Scratch>(trials, [&](std::size_t t, Scratch& s) {
    const BinaryImage bits = apply_threshold(synthesize(truth, model, derive_seed(seed, t)), theta);
    return max_cluster_size(bits.values(), bits.width(), bits.height(), s.scanner);
  });
}

}  // namespace detail

struct PowerRow {
  std::size_t phi = 0;
  std::size_t trials = 0;
  std::size_t detections = 0;
  double rate = 0.0;
  Interval wilson;
};

struct PowerCurve {
  std::size_t n = 0;
  double sigma = 0.0;
  /// 0 for pure-noise (H0) runs.
  std::size_t truth_side = 0;
  ThresholdSelection selection;
  std::vector<PowerRow> rows;
};

/// Empirical detection rate per phi on n x n Gaussian-noise images that are
/// blank (truth_side == 0) or carry a centered truth_side square. Trial t uses
/// the same image for every phi, and "detected" means some black cluster
/// reaches phi, exactly as in detect().
inline PowerCurve fpr_power_curve(std::size_t n, double sigma, std::size_t truth_side, std::vector<std::size_t> phis,
                                  std::size_t trials, std::uint64_t seed, const ThresholdConfig& threshold = {}) {
  if (n < 2) throw InvalidArgument("fpr_power_curve: n must be >= 2");
  if (trials < 100) throw InvalidArgument("fpr_power_curve: trials must be >= 100");
  if (phis.empty()) throw InvalidArgument("fpr_power_curve: phis must be non-empty");
  for (std::size_t phi : phis)
    if (phi < 1) throw InvalidArgument("fpr_power_curve: phi must be >= 1");
  const NoiseModel model = NoiseModel::gaussian(sigma);
  PowerCurve curve;
  curve.n = n;
  curve.sigma = sigma;
  curve.truth_side = truth_side;
  curve.selection = select_theta(model, threshold);
  const auto largest =
      detail::largest_clusters(centered_square(n, n, truth_side), model, curve.selection.theta, trials, seed);
  for (std::size_t phi : phis) {
    PowerRow row;
    row.phi = phi;
    row.trials = trials;
    row.detections = static_cast<std::size_t>(
        std::count_if(largest.begin(), largest.end(), [phi](std::size_t s) { return s >= phi; }));
    row.rate = static_cast<double>(row.detections) / static_cast<double>(trials);
    row.wilson = wilson_interval(row.detections, trials);
    curve.rows.push_back(row);
  }
  return curve;
}

struct PhiCalibration {
  std::size_t phi = 0;
  /// Upper 95% Wilson bound of the H0 false-detection rate at phi.
  double fpr_upper = 0.0;
  std::size_t false_detections = 0;
  /// No phi < n met the budget; phi = n returned without the guarantee.
  bool fallback = false;
};

/// Smallest phi whose empirical H0 false-detection upper Wilson bound is <= alpha.
inline PhiCalibration calibrate_phi(std::size_t n, double sigma, double alpha, std::size_t trials, std::uint64_t seed,
                                    const ThresholdConfig& threshold = {}) {
  if (n < 2) throw InvalidArgument("calibrate_phi: n must be >= 2");
  if (trials < 100) throw InvalidArgument("calibrate_phi: trials must be >= 100");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("calibrate_phi: alpha must lie in (0,1)");
  const NoiseModel model = NoiseModel::gaussian(sigma);
  const ThresholdSelection selection = select_theta(model, threshold);
  const auto largest = detail::largest_clusters(centered_square(n, n, 0), model, selection.theta, trials, seed);

  auto false_detections = [&](std::size_t phi) {
    return static_cast<std::size_t>(
        std::count_if(largest.begin(), largest.end(), [phi](std::size_t s) { return s >= phi; }));
  };
  auto within_budget = [&](std::size_t phi) { return wilson_interval(false_detections(phi), trials).high <= alpha; };

  // Doubling, then bisection on (failing, passing].
  std::size_t failing = 0;
  std::size_t phi = 1;
  while (!within_budget(phi) && phi < n) {
    failing = phi;
    phi = std::min(2 * phi, n);
  }
  PhiCalibration out;
  if (!within_budget(phi)) {
    out.phi = n;
    out.fallback = true;
  } else {
    std::size_t passing = phi;
    while (passing - failing > 1) {
      const std::size_t mid = failing + (passing - failing) / 2;
      (within_budget(mid) ? passing : failing) = mid;
    }
    out.phi = passing;
  }
  out.false_detections = false_detections(out.phi);
  out.fpr_upper = wilson_interval(out.false_detections, trials).high;
  return out;
}

struct RegimeContrast {
  double mean_largest_object = 0.0;
  double mean_largest_background = 0.0;
};

/// Mean largest black cluster on an all-object versus an all-background
/// side x side screen after thresholding at `theta`.
inline RegimeContrast regime_contrast(std::size_t side, const NoiseModel& model, double theta, std::size_t trials,
                                      std::uint64_t seed) {
  auto mean = [](const std::vector<std::size_t>& v) {
    return static_cast<double>(std::accumulate(v.begin(), v.end(), std::size_t{0})) / static_cast<double>(v.size());
  };
  const auto object = detail::largest_clusters(centered_square(side, side, side), model, theta, trials, seed);
  const auto background =
      detail::largest_clusters(centered_square(side, side, 0), model, theta, trials, derive_seed(seed, ~0ULL));
  return {mean(object), mean(background)};
}

}  // namespace percdet

#endif  // PERCDET_LAB_HPP

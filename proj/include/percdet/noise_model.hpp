#ifndef PERCDET_NOISE_MODEL_HPP
#define PERCDET_NOISE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "percdet/error.hpp"

namespace percdet {

namespace detail {

/// inf{y : pred(y)} for a predicate that is false then true along the real
/// line (monotone), by bracket expansion and bisection to `tol`.
template <typename Pred>
double monotone_boundary(Pred pred, double tol) {
  double lo = -1.0;
  double hi = 1.0;
  while (pred(lo)) {
    hi = lo;
    lo *= 2.0;
    if (!std::isfinite(lo)) return -std::numeric_limits<double>::infinity();
  }
  while (!pred(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  // lo fails, hi holds.
  for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, std::fabs(hi)); ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

inline double normal_lower_tail(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Bisection on the tail that is small, so both ends keep relative precision.
inline double normal_quantile(double p) {
  if (p == 0.5) return 0.0;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;
  double lo = -40.0;
  double hi = 0.0;  // lower_tail(lo) < tail <= lower_tail(hi)
  while (hi - lo > 1e-13) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (normal_lower_tail(mid) < tail ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return upper ? -x : x;
}

}  // namespace detail

/// Law of the per-pixel noise. For the Gaussian kind the standardized law F is
/// N(0,1) scaled by sigma; a general model carries the unscaled noise
/// distribution F_gen directly, so `noise_cdf(x) = F(x / sigma)` or `F_gen(x)`.
class NoiseModel {
 public:
  enum class Kind { Gaussian, GeneralCdf };

  static NoiseModel gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw InvalidArgument("NoiseModel: sigma must be finite and > 0");
    NoiseModel m;
    m.kind_ = Kind::Gaussian;
    m.sigma_ = sigma;
    return m;
  }

  /// Piecewise-linear CDF through (xs[k], cdf[k]). Repeated abscissae encode
  /// jumps (atoms); the CDF is right-continuous, 0 left of xs.front() and 1
  /// from xs.back() on.
  static NoiseModel from_table(std::vector<double> xs, std::vector<double> cdf) {
    if (xs.size() != cdf.size() || xs.size() < 2)
      throw InvalidArgument("NoiseModel table: need >= 2 points and equal lengths");
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (!std::isfinite(xs[k]) || !(cdf[k] >= 0.0 && cdf[k] <= 1.0))
        throw InvalidArgument("NoiseModel table: abscissae must be finite and values in [0,1]");
      if (k > 0 && (xs[k] < xs[k - 1] || cdf[k] < cdf[k - 1]))
        throw InvalidArgument("NoiseModel table: points must be non-decreasing");
    }
    if (cdf.back() != 1.0) throw InvalidArgument("NoiseModel table: last value must be 1");
    NoiseModel m;
    m.kind_ = Kind::GeneralCdf;
    m.xs_ = std::move(xs);
    m.table_ = std::move(cdf);
    return m;
  }

  /// General law given by closures. Without a quantile closure the inverse is
  /// found by bisection on the CDF.
  static NoiseModel from_functions(std::function<double(double)> cdf,
                                   std::function<double(double)> quantile = {}) {
    if (!cdf) throw InvalidArgument("NoiseModel: cdf closure required");
    NoiseModel m;
    m.kind_ = Kind::GeneralCdf;
    m.cdf_fn_ = std::move(cdf);
    m.quantile_fn_ = std::move(quantile);
    return m;
  }

  Kind kind() const noexcept { return kind_; }
  /// Noise scale; 1 for general models, whose scale is folded into F_gen.
  double sigma() const noexcept { return sigma_; }
  bool is_table() const noexcept { return !xs_.empty(); }
  const std::vector<double>& table_x() const noexcept { return xs_; }
  const std::vector<double>& table_cdf() const noexcept { return table_; }

  /// F (standardized) for Gaussian, F_gen for general.
  double cdf(double y) const {
    if (std::isnan(y)) throw InvalidArgument("cdf: argument is NaN");
    if (kind_ == Kind::Gaussian) return detail::normal_lower_tail(y);
    if (is_table()) return table_cdf(y);
    return std::clamp(cdf_fn_(y), 0.0, 1.0);
  }

  /// inf{y : cdf(y) >= p}.
  double quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile: p must lie in [0,1]");
    if (kind_ == Kind::Gaussian) return detail::normal_quantile(p);
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (is_table()) return table_quantile(p, false);
    if (quantile_fn_) return quantile_fn_(p);
    return detail::monotone_boundary([&](double y) { return cdf(y) >= p; }, 1e-13);
  }

  /// inf{y : cdf(y) > p}; differs from quantile(p) only where the CDF is flat at level p.
  double upper_quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("upper_quantile: p must lie in [0,1]");
    if (kind_ == Kind::Gaussian) return detail::normal_quantile(p);
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    if (is_table()) return table_quantile(p, true);
    return detail::monotone_boundary([&](double y) { return cdf(y) > p; }, 1e-13);
  }

  /// P(noise <= x) on the intensity scale.
  double noise_cdf(double x) const { return kind_ == Kind::Gaussian ? cdf(x / sigma_) : cdf(x); }

  /// 1 - P(noise <= x), evaluated without cancellation for the Gaussian kind.
  double noise_complement(double x) const {
    if (kind_ == Kind::Gaussian) return detail::normal_upper_tail(x / sigma_);
    return 1.0 - cdf(x);
  }

  double noise_quantile(double p) const {
    return kind_ == Kind::Gaussian ? sigma_ * quantile(p) : quantile(p);
  }

  double noise_upper_quantile(double p) const {
    return kind_ == Kind::Gaussian ? sigma_ * upper_quantile(p) : upper_quantile(p);
  }

  std::string describe() const {
    if (kind_ == Kind::Gaussian) return "gaussian";
    return is_table() ? "table" : "closure";
  }

 private:
  NoiseModel() = default;

  double table_cdf(double y) const {
    if (y < xs_.front()) return 0.0;
    if (y >= xs_.back()) return 1.0;
    const auto k = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), y) - xs_.begin()) - 1;
    if (xs_[k] == y) return table_[k];
    const double t = (y - xs_[k]) / (xs_[k + 1] - xs_[k]);
    return table_[k] + t * (table_[k + 1] - table_[k]);
  }

  double table_quantile(double p, bool strict) const {
    const auto it = strict ? std::upper_bound(table_.begin(), table_.end(), p)
                           : std::lower_bound(table_.begin(), table_.end(), p);
    if (it == table_.end()) return std::numeric_limits<double>::infinity();
    const auto k = static_cast<std::size_t>(it - table_.begin());
    if (k == 0) return xs_.front();
    if (xs_[k - 1] == xs_[k]) return xs_[k];
    const double t = (p - table_[k - 1]) / (table_[k] - table_[k - 1]);
    return xs_[k - 1] + t * (xs_[k] - xs_[k - 1]);
  }

  Kind kind_ = Kind::Gaussian;
  double sigma_ = 1.0;
  std::vector<double> xs_;
  std::vector<double> table_;
  std::function<double(double)> cdf_fn_;
  std::function<double(double)> quantile_fn_;
};

}  // namespace percdet

#endif  // PERCDET_NOISE_MODEL_HPP

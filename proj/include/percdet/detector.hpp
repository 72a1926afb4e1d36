#ifndef PERCDET_DETECTOR_HPP
#define PERCDET_DETECTOR_HPP

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "percdet/cluster.hpp"
#include "percdet/error.hpp"
#include "percdet/noise_model.hpp"
#include "percdet/raster.hpp"
#include "percdet/thresholding.hpp"

namespace percdet {

enum class PhiRule { ExplicitPhi, LogSquared };

struct DetectionConfig {
  NoiseModel model;
  ThresholdConfig threshold{};
  /// Target false-detection probability.
  double alpha = 0.05;
  std::optional<std::size_t> phi{};
  PhiRule phi_rule = PhiRule::LogSquared;

  void validate() const {
    threshold.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    if (phi_rule == PhiRule::ExplicitPhi && !phi) throw InvalidArgument("explicit phi rule needs phi");
    if (phi && *phi < 1) throw InvalidArgument("phi must be >= 1");
  }
};

struct DetectionReport {
  bool detected = false;
  double theta_used = 0.0;
  std::size_t phi_used = 0;
  /// Largest cluster seen before the search stopped.
  std::size_t largest_cluster_size = 0;
  /// Pixels of the triggering cluster in visit order; empty if nothing was detected.
  std::vector<Pixel> witness_pixels;
  double p_out = 0.0;
  double p_im = 0.0;
  bool truncated = false;
  double elapsed_seconds = 0.0;
  std::size_t pixel_count = 0;
};

/// Minimum evidence cluster size for an N-pixel-wide screen:
/// max(ceil((ln n)^2), ceil(ln(1/alpha)) + 1), clamped to n.
inline std::size_t default_phi(std::size_t n, double alpha) {
  if (n < 2) throw InvalidArgument("default_phi: n must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("default_phi: alpha must lie in (0,1)");
  const double ln_n = std::log(static_cast<double>(n));
  const auto log_squared = static_cast<std::size_t>(std::ceil(ln_n * ln_n));
  const auto alpha_floor = static_cast<std::size_t>(std::ceil(std::log(1.0 / alpha))) + 1;
  return std::min(std::max(log_squared, alpha_floor), n);
}

inline std::size_t resolve_phi(const DetectionConfig& cfg, std::size_t side) {
  if (cfg.phi) {
    if (*cfg.phi < 1 || *cfg.phi > side)
      throw InvalidArgument("phi must lie in [1, " + std::to_string(side) + "]");
    return *cfg.phi;
  }
  return default_phi(side, cfg.alpha);
}

/// Steps 1-4 with an already chosen threshold.
inline DetectionReport detect_with_threshold(const GrayImage& img, const ThresholdSelection& selection,
                                             std::size_t phi) {
  if (phi < 1) throw InvalidArgument("phi must be >= 1");
  DetectionReport report;
  report.theta_used = selection.theta;
  report.p_out = selection.p_out;
  report.p_im = selection.p_im;
  report.phi_used = phi;
  report.pixel_count = img.size();

  const BinaryImage bits = apply_threshold(img, selection.theta);
  ClusterLabeling labeling = label_clusters(bits, phi);
  report.truncated = labeling.truncated;
  report.largest_cluster_size = labeling.largest_size();
  report.detected = report.largest_cluster_size >= phi;
  if (report.detected)
    report.witness_pixels = std::move(labeling.cluster_pixels[static_cast<std::size_t>(labeling.largest_cluster_id)]);
  return report;
}

/// Percolation test of H0 "pure noise" against H1 "an object is present".
inline DetectionReport detect(const GrayImage& img, const DetectionConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  if (img.width() < 2 || img.height() < 2) throw InvalidArgument("detect: image must be at least 2x2");
  const std::size_t phi = resolve_phi(cfg, img.side());
  const ThresholdSelection selection = select_theta(cfg.model, cfg.threshold);
  DetectionReport report = detect_with_threshold(img, selection, phi);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace percdet

#endif  // PERCDET_DETECTOR_HPP

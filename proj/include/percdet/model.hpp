#ifndef PERCDET_MODEL_HPP
#define PERCDET_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "percdet/error.hpp"
#include "percdet/noise_model.hpp"
#include "percdet/random.hpp"
#include "percdet/raster.hpp"

namespace percdet {

/// Probability that a background pixel is observed at or above y.
inline double p0_tail(const NoiseModel& model, double y) {
  if (!std::isfinite(y)) throw InvalidArgument("p0_tail: y must be finite");
  return model.noise_complement(y);
}

/// Probability that an object pixel is observed at or below y.
inline double p1_cdf(const NoiseModel& model, double y) {
  if (!std::isfinite(y)) throw InvalidArgument("p1_cdf: y must be finite");
  return model.noise_cdf(y - 1.0);
}

/// One noise draw for stream position k.
inline double draw_noise(const NoiseModel& model, const CounterStream& stream, std::uint64_t k) {
  if (model.kind() == NoiseModel::Kind::Gaussian) return model.sigma() * stream.normal(k);
  return model.quantile(stream.open_uniform(2 * k));
}

/// Y = Im + noise, pixel index i consuming draw i of the stream keyed by seed.
inline GrayImage synthesize(const TrueImage& truth, const NoiseModel& model, std::uint64_t seed) {
  const CounterStream stream(seed);
  std::vector<double> y(truth.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = static_cast<double>(truth[i]) + draw_noise(model, stream, i);
  return GrayImage(truth.width(), truth.height(), std::move(y));
}

}  // namespace percdet

#endif  // PERCDET_MODEL_HPP

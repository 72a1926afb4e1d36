#ifndef PERCDET_RASTER_HPP
#define PERCDET_RASTER_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "percdet/error.hpp"

namespace percdet {

struct Pixel {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Row-major width x height array whose entries satisfy `Traits::valid`.
template <typename T, typename Traits>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(std::size_t width, std::size_t height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    if (width_ == 0 || height_ == 0)
      throw InvalidArgument(std::string(Traits::name) + ": width and height must be >= 1");
    if (values_.size() != width_ * height_)
      throw InvalidArgument(std::string(Traits::name) + ": expected " +
                            std::to_string(width_ * height_) + " values, got " +
                            std::to_string(values_.size()));
    for (const T& v : values_)
      if (!Traits::valid(v))
        throw InvalidArgument(std::string(Traits::name) + ": " + Traits::invalid_reason);
  }

  static Raster filled(std::size_t width, std::size_t height, T value) {
    return Raster(width, height, std::vector<T>(width * height, value));
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  /// Single side length N for formulas written for square screens.
  std::size_t side() const noexcept { return width_ > height_ ? width_ : height_; }

  std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * width_ + col; }
  const T& at(std::size_t row, std::size_t col) const noexcept { return values_[index(row, col)]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const T> values() const noexcept { return values_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> values_;
};

namespace detail {

struct GrayTraits {
  static constexpr const char* name = "GrayImage";
  static constexpr const char* invalid_reason = "values must be finite";
  static bool valid(double v) noexcept { return std::isfinite(v); }
};

struct MaskTraits {
  static constexpr const char* name = "TrueImage";
  static constexpr const char* invalid_reason = "mask entries must be 0 or 1";
  static bool valid(std::uint8_t v) noexcept { return v <= 1; }
};

struct BitsTraits {
  static constexpr const char* name = "BinaryImage";
  static constexpr const char* invalid_reason = "bits must be 0 or 1";
  static bool valid(std::uint8_t v) noexcept { return v <= 1; }
};

}  // namespace detail

/// Observed intensities Y.
using GrayImage = Raster<double, detail::GrayTraits>;
/// Noise-free black (1) / white (0) picture.
using TrueImage = Raster<std::uint8_t, detail::MaskTraits>;
/// Thresholded picture; 1 = black.
using BinaryImage = Raster<std::uint8_t, detail::BitsTraits>;

/// All-white truth with a centered side x side black square (side may be 0).
inline TrueImage centered_square(std::size_t width, std::size_t height, std::size_t side) {
  if (side > width || side > height) throw InvalidArgument("centered_square: square exceeds screen");
  std::vector<std::uint8_t> mask(width * height, 0);
  const std::size_t r0 = (height - side) / 2;
  const std::size_t c0 = (width - side) / 2;
  for (std::size_t r = r0; r < r0 + side; ++r)
    for (std::size_t c = c0; c < c0 + side; ++c) mask[r * width + c] = 1;
  return TrueImage(width, height, std::move(mask));
}

inline GrayImage to_gray(const BinaryImage& img) {
  std::vector<double> v(img.values().begin(), img.values().end());
  return GrayImage(img.width(), img.height(), std::move(v));
}

}  // namespace percdet

#endif  // PERCDET_RASTER_HPP

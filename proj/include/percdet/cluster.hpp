#ifndef PERCDET_CLUSTER_HPP
#define PERCDET_CLUSTER_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "percdet/error.hpp"
#include "percdet/raster.hpp"

namespace percdet {

/// Side-sharing neighbor directions. Diagonal pixels are not adjacent.
enum class Step : std::uint8_t { Up, Down, Left, Right };
using NeighborOrder = std::array<Step, 4>;
inline constexpr NeighborOrder kDefaultNeighborOrder{Step::Right, Step::Down, Step::Left, Step::Up};

/// Iterative depth-first search over 4-connected black pixels with reusable
/// buffers. Clusters are seeded in row-major order and numbered from 1.
class ClusterScanner {
 public:
  /// `on_pixel(label, index)` is called when a pixel joins a cluster and may
  /// return false to halt the whole scan; `on_cluster(label)` fires after a
  /// cluster is exhausted. Returns false if halted.
  template <typename OnPixel, typename OnCluster>
  bool scan(std::span<const std::uint8_t> bits, std::size_t width, std::size_t height, OnPixel&& on_pixel,
            OnCluster&& on_cluster, const NeighborOrder& order = kDefaultNeighborOrder) {
    const std::size_t n = width * height;
    labels_.assign(n, 0);
    stack_.clear();
    std::int32_t next = 0;
    for (std::size_t seed = 0; seed < n; ++seed) {
      if (!bits[seed] || labels_[seed] != 0) continue;
      const std::int32_t label = ++next;
      labels_[seed] = label;
      stack_.push_back(seed);
      if (!on_pixel(label, seed)) return false;
      while (!stack_.empty()) {
        const std::size_t cur = stack_.back();
        stack_.pop_back();
        const std::size_t r = cur / width;
        const std::size_t c = cur - r * width;
        for (Step s : order) {
          std::size_t nb;
          switch (s) {
            case Step::Up:
              if (r == 0) continue;
              nb = cur - width;
              break;
            case Step::Down:
              if (r + 1 == height) continue;
              nb = cur + width;
              break;
            case Step::Left:
              if (c == 0) continue;
              nb = cur - 1;
              break;
            default:
              if (c + 1 == width) continue;
              nb = cur + 1;
              break;
          }
          if (!bits[nb] || labels_[nb] != 0) continue;
          labels_[nb] = label;
          stack_.push_back(nb);
          if (!on_pixel(label, nb)) return false;
        }
      }
      on_cluster(label);
    }
    return true;
  }

  std::span<const std::int32_t> labels() const noexcept { return labels_; }
  std::vector<std::int32_t> take_labels() noexcept { return std::move(labels_); }

 private:
  std::vector<std::int32_t> labels_;
  std::vector<std::size_t> stack_;
};

/// Partition of the black pixels into 4-connected clusters. Index 0 of
/// `cluster_sizes` and `cluster_pixels` stands for white and stays empty.
struct ClusterLabeling {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> cluster_sizes;
  std::vector<std::vector<Pixel>> cluster_pixels;
  std::int32_t largest_cluster_id = 0;
  /// Set when the search halted at `stop_at`; the labeling then covers only visited pixels.
  bool truncated = false;

  std::size_t cluster_count() const noexcept { return cluster_sizes.empty() ? 0 : cluster_sizes.size() - 1; }
  std::size_t largest_size() const noexcept {
    return largest_cluster_id > 0 ? cluster_sizes[static_cast<std::size_t>(largest_cluster_id)] : 0;
  }
  std::int32_t label_at(std::size_t row, std::size_t col) const noexcept { return labels[row * width + col]; }
};

inline ClusterLabeling label_clusters(const BinaryImage& img, std::optional<std::size_t> stop_at = std::nullopt,
                                      const NeighborOrder& order = kDefaultNeighborOrder) {
  if (stop_at && *stop_at < 1) throw InvalidArgument("label_clusters: stop_at must be >= 1");
  ClusterLabeling out;
  out.width = img.width();
  out.height = img.height();
  out.cluster_sizes.push_back(0);
  out.cluster_pixels.emplace_back();

  const std::size_t w = img.width();
  ClusterScanner scanner;
  const bool complete = scanner.scan(
      img.values(), w, img.height(),
      [&](std::int32_t label, std::size_t idx) {
        const auto k = static_cast<std::size_t>(label);
        if (k == out.cluster_sizes.size()) {
          out.cluster_sizes.push_back(0);
          out.cluster_pixels.emplace_back();
        }
        ++out.cluster_sizes[k];
        out.cluster_pixels[k].push_back({idx / w, idx % w});
        if (stop_at && out.cluster_sizes[k] >= *stop_at) {
          out.largest_cluster_id = label;
          return false;
        }
        return true;
      },
      [](std::int32_t) {}, order);
  out.labels = scanner.take_labels();
  out.truncated = !complete;
  if (complete) {
    for (std::size_t k = 1; k < out.cluster_sizes.size(); ++k)
      if (out.cluster_sizes[k] > out.largest_size()) out.largest_cluster_id = static_cast<std::int32_t>(k);
  }
  return out;
}

inline std::size_t max_cluster_size(std::span<const std::uint8_t> bits, std::size_t width, std::size_t height,
                                    ClusterScanner& scanner) {
  std::size_t best = 0;
  std::size_t current = 0;
  scanner.scan(
      bits, width, height,
      [&](std::int32_t, std::size_t) {
        ++current;
        return true;
      },
      [&](std::int32_t) {
        best = std::max(best, current);
        current = 0;
      });
  return best;
}

inline std::size_t max_cluster_size(const BinaryImage& img) {
  ClusterScanner scanner;
  return max_cluster_size(img.values(), img.width(), img.height(), scanner);
}

}  // namespace percdet

#endif  // PERCDET_CLUSTER_HPP

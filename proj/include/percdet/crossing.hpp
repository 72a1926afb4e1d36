#ifndef PERCDET_CROSSING_HPP
#define PERCDET_CROSSING_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "percdet/raster.hpp"

namespace percdet {

/// Whether an open (black) 4-connected path joins the left and right columns.
inline bool has_left_right_crossing(const BinaryImage& grid) {
  const std::size_t w = grid.width();
  const std::size_t h = grid.height();
  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t i = r * w;
    if (grid[i] && !seen[i]) {
      seen[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    const std::size_t r = cur / w;
    const std::size_t c = cur % w;
    if (c + 1 == w) return true;
    auto visit = [&](std::size_t nb) {
      if (grid[nb] && !seen[nb]) {
        seen[nb] = 1;
        stack.push_back(nb);
      }
    };
    if (c + 1 < w) visit(cur + 1);
    if (r + 1 < h) visit(cur + w);
    if (c > 0) visit(cur - 1);
    if (r > 0) visit(cur - w);
  }
  return false;
}

/// Dinic max flow over integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : head_(nodes, -1), level_(nodes), iter_(nodes) {}

  void add_edge(std::size_t from, std::size_t to, int capacity) {
    edges_.push_back({static_cast<int>(to), head_[from], capacity});
    head_[from] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({static_cast<int>(from), head_[to], 0});
    head_[to] = static_cast<int>(edges_.size()) - 1;
  }

  long long run(std::size_t source, std::size_t sink) {
    long long total = 0;
    while (build_levels(source, sink)) {
      for (std::size_t v = 0; v < head_.size(); ++v) iter_[v] = head_[v];
      while (const int pushed = augment(static_cast<int>(source), static_cast<int>(sink),
                                        std::numeric_limits<int>::max()))
        total += pushed;
    }
    return total;
  }

 private:
  struct Edge {
    int to;
    int next;
    int cap;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> queue{static_cast<int>(source)};
    level_[source] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int v = queue[qi];
      for (int e = head_[v]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[v] + 1;
          queue.push_back(edges_[e].to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  // Iterative blocking-flow augmentation would be faster for huge graphs;
  // recursion depth is bounded by the BFS level count here.
  int augment(int v, int sink, int limit) {
    if (v == sink) return limit;
    for (int& e = iter_[v]; e != -1; e = edges_[e].next) {
      Edge& edge = edges_[e];
      if (edge.cap > 0 && level_[edge.to] == level_[v] + 1) {
        const int got = augment(edge.to, sink, std::min(limit, edge.cap));
        if (got > 0) {
          edge.cap -= got;
          edges_[e ^ 1].cap += got;
          return got;
        }
      }
    }
    return 0;
  }

  std::vector<int> head_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

/// Maximum number of vertex-disjoint open left-right crossings, computed as a
/// unit-vertex-capacity max flow (Menger).
inline std::size_t max_disjoint_crossings(const BinaryImage& grid) {
  const std::size_t w = grid.width();
  const std::size_t h = grid.height();
  const std::size_t n = grid.size();
  const std::size_t source = 2 * n;
  const std::size_t sink = 2 * n + 1;
  MaxFlow flow(2 * n + 2);
  auto in = [](std::size_t v) { return 2 * v; };
  auto out = [](std::size_t v) { return 2 * v + 1; };
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t v = r * w + c;
      if (!grid[v]) continue;
      flow.add_edge(in(v), out(v), 1);
      if (c == 0) flow.add_edge(source, in(v), 1);
      if (c + 1 == w) flow.add_edge(out(v), sink, 1);
      if (c + 1 < w && grid[v + 1]) {
        flow.add_edge(out(v), in(v + 1), 1);
        flow.add_edge(out(v + 1), in(v), 1);
      }
      if (r + 1 < h && grid[v + w]) {
        flow.add_edge(out(v), in(v + w), 1);
        flow.add_edge(out(v + w), in(v), 1);
      }
    }
  }
  return static_cast<std::size_t>(flow.run(source, sink));
}

}  // namespace percdet

#endif  // PERCDET_CROSSING_HPP

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "graywatch/rng.hpp"
#include "graywatch/types.hpp"

namespace graywatch {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Static unit-disk radio graph. Nodes within range (boundary inclusive) are
// neighbors; adjacency is precomputed and sorted so iteration order is stable.
class Topology {
 public:
  Topology(std::vector<Vec2> positions, double range)
      : positions_(std::move(positions)), range_(range) {
    if (range_ < 0.0) throw std::invalid_argument("negative radio range");
    adjacency_.resize(positions_.size());
    for (NodeId a = 0; a < positions_.size(); ++a) {
      for (NodeId b = a + 1; b < positions_.size(); ++b) {
        if (distance(positions_[a], positions_[b]) <= range_) {
          adjacency_[a].push_back(b);
          adjacency_[b].push_back(a);
        }
      }
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  }

  static Topology uniform(std::size_t n, double width, double height, double range, Rng& rng) {
    std::vector<Vec2> pos(n);
    for (auto& p : pos) {
      p.x = rng.uniform(0.0, width);
      p.y = rng.uniform(0.0, height);
    }
    return Topology(std::move(pos), range);
  }

  std::size_t size() const { return positions_.size(); }
  double range() const { return range_; }
  const Vec2& position(NodeId n) const { return positions_.at(n); }

  const std::vector<NodeId>& neighbors(NodeId n) const {
    if (n >= adjacency_.size()) throw std::out_of_range("unknown node id");
    return adjacency_[n];
  }

  bool adjacent(NodeId a, NodeId b) const {
    const auto& nbrs = neighbors(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
  }

  bool connected() const {
    if (positions_.empty()) return true;
    std::vector<char> seen(positions_.size(), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      for (NodeId m : adjacency_[n]) {
        if (!seen[m]) {
          seen[m] = 1;
          ++count;
          stack.push_back(m);
        }
      }
    }
    return count == positions_.size();
  }

 private:
  std::vector<Vec2> positions_;
  double range_ = 0.0;
  std::vector<std::vector<NodeId>> adjacency_;
};

}  // namespace graywatch

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hoieval/geom.hpp"

namespace hoieval {

// Static 3D KD-tree for exact nearest-neighbour queries. Built once per
// point set and immutable afterwards, so concurrent queries are safe.
class KdTree3 {
 public:
  explicit KdTree3(std::span<const Vec3> points, std::size_t leaf_size = 12);

  struct Hit {
    std::size_t index = 0;
    double squared_distance = std::numeric_limits<double>::infinity();
  };

  Hit nearest(const Vec3 &query) const;
  std::size_t size() const noexcept { return order_.size(); }

 private:
  struct Node {
    // Leaves have left < 0 and own [begin, end) of the reordered arrays.
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t axis = 0;
    double split = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };

  std::int32_t build(const Vec3 *pts, std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const double q[3], Hit &best) const;

  std::size_t leaf_size_;
  std::vector<double> xyz_;  // reordered, interleaved x,y,z
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace hoieval

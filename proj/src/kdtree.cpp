#include "hoieval/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "hoieval/errors.hpp"

namespace hoieval {

KdTree3::KdTree3(std::span<const Vec3> points, std::size_t leaf_size)
    : leaf_size_(std::max<std::size_t>(1, leaf_size)) {
  if (points.empty()) throw Error(ErrorKind::kEmptyCloud, "kd-tree over empty point set");
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points.size() / leaf_size_ + 1);
  build(points.data(), 0, static_cast<std::uint32_t>(points.size()));
  xyz_.resize(3 * points.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const Vec3 &p = points[order_[i]];
    xyz_[3 * i] = p.x();
    xyz_[3 * i + 1] = p.y();
    xyz_[3 * i + 2] = p.z();
  }
}

std::int32_t KdTree3::build(const Vec3 *pts, std::uint32_t begin,
                             std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{-1, -1, 0, 0.0, begin, end});
  if (end - begin <= leaf_size_) return id;

  Vec3 lo = pts[order_[begin]];
  Vec3 hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(pts[order_[i]]);
    hi = hi.cwiseMax(pts[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as a leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [pts, axis](std::uint32_t a, std::uint32_t b) {
                     return pts[a][axis] < pts[b][axis];
                   });
  const double split = pts[order_[mid]][axis];
  const std::int32_t left = build(pts, begin, mid);
  const std::int32_t right = build(pts, mid, end);
  Node &node = nodes_[id];
  node.left = left;
  node.right = right;
  node.axis = axis;
  node.split = split;
  return id;
}

KdTree3::Hit KdTree3::nearest(const Vec3 &query) const {
  const double q[3] = {query.x(), query.y(), query.z()};
  Hit best;
  search(0, q, best);
  best.index = order_[best.index];
  return best;
}

void KdTree3::search(std::int32_t node_id, const double q[3], Hit &best) const {
  const Node &node = nodes_[node_id];
  if (node.left < 0) {
    const double *p = xyz_.data() + 3 * node.begin;
    for (std::uint32_t i = node.begin; i < node.end; ++i, p += 3) {
      const double dx = q[0] - p[0];
      const double dy = q[1] - p[1];
      const double dz = q[2] - p[2];
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 < best.squared_distance) {
        best.squared_distance = d2;
        best.index = i;
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t first = diff < 0.0 ? node.left : node.right;
  const std::int32_t second = diff < 0.0 ? node.right : node.left;
  search(first, q, best);
  if (diff * diff < best.squared_distance) search(second, q, best);
}

}  // namespace hoieval

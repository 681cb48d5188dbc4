#include "hoieval/reference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hoieval/errors.hpp"

namespace hoieval::reference {

double chamfer_bruteforce(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::kEmptyCloud, "chamfer needs two clouds");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> row_best(a.size(), inf), col_best(b.size(), inf);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = (a[i] - b[j]).squaredNorm();
      row_best[i] = std::min(row_best[i], d);
      col_best[j] = std::min(col_best[j], d);
    }
  }
  double sum_ab = 0.0, sum_ba = 0.0;
  for (double d : row_best) sum_ab += std::sqrt(d);
  for (double d : col_best) sum_ba += std::sqrt(d);
  return 0.5 * (sum_ab / static_cast<double>(a.size()) + sum_ba / static_cast<double>(b.size()));
}

namespace {

// Nearest squared distance from every query to `pts`. Points are sorted by
// their coordinate along a fixed oblique unit direction; the scan walks
// outwards from the query's position and stops once that coordinate gap alone
// exceeds the best distance. The direction is oblique so flat faces aligned
// with an axis do not collapse onto one key.
std::vector<double> sweep_nearest(std::span<const Vec3> queries, std::span<const Vec3> pts) {
  const Vec3 dir = Vec3(1.0, 2.0, 3.0).normalized() * (1.0 - 1e-12);
  std::vector<std::pair<double, Vec3>> sorted;
  sorted.reserve(pts.size());
  for (const Vec3 &p : pts) sorted.emplace_back(p.dot(dir), p);
  std::sort(sorted.begin(), sorted.end(), [](const auto &p, const auto &q) { return p.first < q.first; });
  std::vector<double> out;
  out.reserve(queries.size());
  for (const Vec3 &q : queries) {
    const double key = q.dot(dir);
    const auto start = static_cast<std::ptrdiff_t>(
        std::lower_bound(sorted.begin(), sorted.end(), key,
                         [](const auto &p, double k) { return p.first < k; }) -
        sorted.begin());
    double best = std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t i = start; i < static_cast<std::ptrdiff_t>(sorted.size()); ++i) {
      const double gap = sorted[i].first - key;
      if (gap * gap > best) break;
      best = std::min(best, (sorted[i].second - q).squaredNorm());
    }
    for (std::ptrdiff_t i = start - 1; i >= 0; --i) {
      const double gap = key - sorted[i].first;
      if (gap * gap > best) break;
      best = std::min(best, (sorted[i].second - q).squaredNorm());
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace

double chamfer_sweep(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::kEmptyCloud, "chamfer needs two clouds");
  double sum_ab = 0.0, sum_ba = 0.0;
  for (double d : sweep_nearest(a, b)) sum_ab += std::sqrt(d);
  for (double d : sweep_nearest(b, a)) sum_ba += std::sqrt(d);
  return 0.5 * (sum_ab / static_cast<double>(a.size()) + sum_ba / static_cast<double>(b.size()));
}

SimilarityTransform horn_similarity(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size() || src.size() < 3) {
    throw Error(ErrorKind::kCountMismatch, "alignment needs two equal sets of >= 3 points");
  }
  const double n = static_cast<double>(src.size());
  Vec3 ms = Vec3::Zero(), md = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    ms += src[i];
    md += dst[i];
  }
  ms /= n;
  md /= n;
  Mat3 s = Mat3::Zero();
  double src_ss = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 p = src[i] - ms;
    s += p * (dst[i] - md).transpose();
    src_ss += p.squaredNorm();
  }
  const double sxx = s(0, 0), sxy = s(0, 1), sxz = s(0, 2);
  const double syx = s(1, 0), syy = s(1, 1), syz = s(1, 2);
  const double szx = s(2, 0), szy = s(2, 1), szz = s(2, 2);
  Eigen::Matrix4d nmat;
  nmat << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
          syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
          szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
          sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(nmat);
  const Eigen::Vector4d q = eig.eigenvectors().col(3);
  SimilarityTransform t;
  t.rotation = Eigen::Quaterniond(q(0), q(1), q(2), q(3)).normalized().toRotationMatrix();
  double num = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    num += (dst[i] - md).dot(t.rotation * (src[i] - ms));
  }
  t.scale = num / src_ss;
  t.translation = md - t.scale * (t.rotation * ms);
  return t;
}

double quaternion_angle(const Mat3 &a, const Mat3 &b) {
  const Eigen::Quaterniond qa(a), qb(b);
  const Eigen::Quaterniond d = qa.conjugate() * qb;
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

double diameter_bruteforce(std::span<const Vec3> vertices) {
  double best = 0.0;
  for (const auto &p : vertices) {
    for (const auto &q : vertices) best = std::max(best, (p - q).norm());
  }
  return best;
}

double mssd_exhaustive(const RigidPose &pred, const RigidPose &gt,
                       std::span<const Vec3> vertices, std::span<const Mat3> symmetries) {
  double best = std::numeric_limits<double>::infinity();
  for (const Mat3 &s : symmetries) {
    double worst = 0.0;
    for (const Vec3 &x : vertices) {
      const Vec3 p = pred.rotation * x + pred.translation;
      const Vec3 g = gt.rotation * (s * x) + gt.translation;
      worst = std::max(worst, (p - g).norm());
    }
    best = std::min(best, worst);
  }
  return best;
}

double mspd_exhaustive(const RigidPose &pred, const RigidPose &gt,
                       std::span<const Vec3> vertices, std::span<const Mat3> symmetries,
                       const CameraIntrinsics &k) {
  auto pixel = [&k](const Vec3 &p) {
    return Vec2(k.fx * (p.x() / p.z()) + k.cx, k.fy * (p.y() / p.z()) + k.cy);
  };
  double best = std::numeric_limits<double>::infinity();
  for (const Mat3 &s : symmetries) {
    double worst = 0.0;
    for (const Vec3 &x : vertices) {
      const Vec2 p = pixel(pred.rotation * x + pred.translation);
      const Vec2 g = pixel(gt.rotation * (s * x) + gt.translation);
      worst = std::max(worst, (p - g).norm());
    }
    best = std::min(best, worst);
  }
  return best;
}

double re_exhaustive_deg(const Mat3 &pred_r, const Mat3 &gt_r, std::span<const Mat3> symmetries) {
  double best = std::numeric_limits<double>::infinity();
  for (const Mat3 &s : symmetries) best = std::min(best, quaternion_angle(pred_r, gt_r * s));
  return best * 180.0 / kPi;
}

std::vector<double> joint_errors_mm(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  std::vector<double> out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Vec3 d = pred[i] - gt[i];
    out.push_back(std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z()) * 1000.0);
  }
  return out;
}

std::size_t pck_count(std::span<const double> errors_mm, double threshold_mm) {
  std::size_t n = 0;
  for (double e : errors_mm) n += e < threshold_mm ? 1 : 0;
  return n;
}

}  // namespace hoieval::reference

#include "hoieval/geom.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "hoieval/errors.hpp"
#include "hoieval/kdtree.hpp"
#include "hoieval/rng.hpp"

namespace hoieval {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::kZeroVariance: return "ZeroVariance";
    case ErrorKind::kBehindCamera: return "BehindCamera";
    case ErrorKind::kEmptyMesh: return "EmptyMesh";
    case ErrorKind::kEmptyCloud: return "EmptyCloud";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kCountMismatch: return "CountMismatch";
    case ErrorKind::kInvalidRotation: return "InvalidRotation";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kZeroExtent: return "ZeroExtent";
    case ErrorKind::kEmptyMask: return "EmptyMask";
    case ErrorKind::kAllZero: return "AllZero";
    case ErrorKind::kNoCurveData: return "NoCurveData";
    case ErrorKind::kMixedTracks: return "MixedTracks";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kInternal: return "Internal";
  }
  return "Unknown";
}

RigidPose RigidPose::inverse() const {
  RigidPose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidPose operator*(const RigidPose &a, const RigidPose &b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

SimilarityTransform SimilarityTransform::inverse() const {
  SimilarityTransform inv;
  inv.scale = 1.0 / scale;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.scale * (inv.rotation * translation));
  return inv;
}

SimilarityTransform operator*(const SimilarityTransform &a,
                              const SimilarityTransform &b) {
  return {a.scale * b.scale, a.rotation * b.rotation,
          a.scale * (a.rotation * b.translation) + a.translation};
}

bool is_rotation(const Mat3 &r, double tol) {
  if (!r.allFinite()) return false;
  const double orth = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return orth <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

void ensure_rotation(const Mat3 &r, const char *what) {
  if (!is_rotation(r)) {
    throw Error(ErrorKind::kInvalidRotation,
                std::string(what) + " is not a rotation within 1e-6");
  }
}

void ensure_finite(const Vec3 &v, const char *what) {
  if (!v.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " is not finite");
  }
}

void ensure_intrinsics(const CameraIntrinsics &k) {
  if (!(k.fx > 0.0) || !(k.fy > 0.0) || !std::isfinite(k.fx) ||
      !std::isfinite(k.fy) || !std::isfinite(k.cx) || !std::isfinite(k.cy)) {
    throw Error(ErrorKind::kInvalidArgument,
                "intrinsics need finite fx, fy > 0 and finite principal point");
  }
}

void ensure_mesh(const TriMesh &mesh) {
  const auto n = mesh.vertices.size();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face &face = mesh.faces[f];
    for (auto idx : face) {
      if (idx >= n) {
        throw Error(ErrorKind::kInvalidArgument,
                    "face " + std::to_string(f) + " references vertex " +
                        std::to_string(idx) + " of " + std::to_string(n));
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw Error(ErrorKind::kInvalidArgument,
                  "face " + std::to_string(f) + " repeats a vertex index");
    }
  }
}

Mat3 axis_angle(const Vec3 &axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

PointCloud transform_points(const RigidPose &pose, std::span<const Vec3> pts) {
  PointCloud out;
  out.reserve(pts.size());
  for (const auto &p : pts) out.push_back(pose.apply(p));
  return out;
}

PointCloud transform_points(const SimilarityTransform &t,
                            std::span<const Vec3> pts) {
  PointCloud out;
  out.reserve(pts.size());
  for (const auto &p : pts) out.push_back(t.apply(p));
  return out;
}

TriMesh transform_mesh(const SimilarityTransform &t, const TriMesh &mesh) {
  return {transform_points(t, mesh.vertices), mesh.faces};
}

namespace {

struct Centered {
  Vec3 src_mean;
  Vec3 dst_mean;
  Mat3 cross;       // (1/n) Σ (dst - μd)(src - μs)ᵀ
  double src_var;   // (1/n) Σ |src - μs|²
};

bool bitwise_equal(std::span<const Vec3> a, std::span<const Vec3> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const Vec3 &x, const Vec3 &y) { return x == y; });
}

Centered center_pair(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) {
    throw Error(ErrorKind::kCountMismatch,
                "alignment needs equal point counts (" + std::to_string(src.size()) +
                    " vs " + std::to_string(dst.size()) + ")");
  }
  if (src.size() < 3) {
    throw Error(ErrorKind::kDegenerateConfiguration,
                "alignment needs at least 3 correspondences");
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    ensure_finite(src[i], "source point");
    ensure_finite(dst[i], "target point");
  }
  const double n = static_cast<double>(src.size());
  Centered c;
  c.src_mean.setZero();
  c.dst_mean.setZero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    c.src_mean += src[i];
    c.dst_mean += dst[i];
  }
  c.src_mean /= n;
  c.dst_mean /= n;
  c.cross.setZero();
  Mat3 src_cov = Mat3::Zero();
  c.src_var = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 s = src[i] - c.src_mean;
    const Vec3 d = dst[i] - c.dst_mean;
    c.cross += d * s.transpose();
    src_cov += s * s.transpose();
    c.src_var += s.squaredNorm();
  }
  c.cross /= n;
  c.src_var /= n;
  if (c.src_var == 0.0) {
    throw Error(ErrorKind::kZeroVariance, "all source points coincide");
  }
  // Rank >= 2 needed for a unique rotation.
  Eigen::SelfAdjointEigenSolver<Mat3> eig(src_cov, Eigen::EigenvaluesOnly);
  const Vec3 ev = eig.eigenvalues();  // ascending
  if (ev[1] <= 1e-12 * ev[2]) {
    throw Error(ErrorKind::kDegenerateConfiguration,
                "source points are collinear");
  }
  return c;
}

// Rotation maximising trace(Rᵀ·cross) with det(R) = +1; also returns
// trace(D·E) for the scale estimate.
Mat3 best_rotation(const Mat3 &cross, double *trace_de) {
  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 &u = svd.matrixU();
  const Mat3 &v = svd.matrixV();
  Vec3 e(1.0, 1.0, 1.0);
  if (u.determinant() * v.determinant() < 0.0) e[2] = -1.0;
  if (trace_de != nullptr) *trace_de = svd.singularValues().dot(e);
  return u * e.asDiagonal() * v.transpose();
}

}  // namespace

RigidPose kabsch_rigid(std::span<const Vec3> src, std::span<const Vec3> dst) {
  Centered c;
  try {
    c = center_pair(src, dst);
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::kZeroVariance) {
      throw Error(ErrorKind::kDegenerateConfiguration, "all source points coincide");
    }
    throw;
  }
  if (bitwise_equal(src, dst)) return RigidPose::identity();
  RigidPose pose;
  pose.rotation = best_rotation(c.cross, nullptr);
  pose.translation = c.dst_mean - pose.rotation * c.src_mean;
  return pose;
}

SimilarityTransform procrustes_similarity(std::span<const Vec3> src,
                                          std::span<const Vec3> dst) {
  const Centered c = center_pair(src, dst);
  if (bitwise_equal(src, dst)) return SimilarityTransform::identity();
  SimilarityTransform t;
  double trace_de = 0.0;
  t.rotation = best_rotation(c.cross, &trace_de);
  t.scale = trace_de / c.src_var;
  if (!(t.scale > 0.0) || !std::isfinite(t.scale)) {
    throw Error(ErrorKind::kDegenerateConfiguration,
                "target points coincide; no positive scale");
  }
  t.translation = c.dst_mean - t.scale * (t.rotation * c.src_mean);
  return t;
}

double geodesic_so3(const Mat3 &a, const Mat3 &b) {
  // atan2 form of arccos((trace(aᵀb) - 1) / 2); stays accurate near 0 and pi.
  const Mat3 m = a.transpose() * b;
  const double cos_part = 0.5 * (m.trace() - 1.0);
  const Vec3 skew(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double sin_part = 0.5 * skew.norm();
  return std::atan2(sin_part, cos_part);
}

Vec2 project(const CameraIntrinsics &k, const Vec3 &p) {
  if (!(p.z() > 0.0)) {
    throw Error(ErrorKind::kBehindCamera,
                "point at depth " + std::to_string(p.z()) + " cannot be projected");
  }
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

double triangle_area(const Vec3 &a, const Vec3 &b, const Vec3 &c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

PointCloud sample_surface(const TriMesh &mesh, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "sample count must be >= 1");
  ensure_mesh(mesh);
  std::vector<double> cdf;
  cdf.reserve(mesh.faces.size());
  double total = 0.0;
  for (const Face &f : mesh.faces) {
    total += triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]],
                           mesh.vertices[f[2]]);
    cdf.push_back(total);
  }
  if (!(total > 0.0)) throw Error(ErrorKind::kEmptyMesh, "mesh has zero surface area");

  Rng rng(seed);
  PointCloud out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const Face &f = mesh.faces[static_cast<std::size_t>(it - cdf.begin())];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vec3 &a = mesh.vertices[f[0]];
    const Vec3 &b = mesh.vertices[f[1]];
    const Vec3 &c = mesh.vertices[f[2]];
    out.push_back((1.0 - r1) * a + (r1 * (1.0 - r2)) * b + (r1 * r2) * c);
  }
  return out;
}

namespace {

double mean_nearest(std::span<const Vec3> queries, const KdTree3 &tree) {
  double sum = 0.0;
  for (const auto &q : queries) sum += std::sqrt(tree.nearest(q).squared_distance);
  return sum / static_cast<double>(queries.size());
}

}  // namespace

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kEmptyCloud, "chamfer needs two non-empty clouds");
  }
  const KdTree3 tree_a(a);
  const KdTree3 tree_b(b);
  return 0.5 * (mean_nearest(a, tree_b) + mean_nearest(b, tree_a));
}

double mesh_diameter(const TriMesh &mesh) {
  const auto &v = mesh.vertices;
  if (v.size() < 2) throw Error(ErrorKind::kEmptyMesh, "diameter needs >= 2 vertices");
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      best = std::max(best, (v[i] - v[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

}  // namespace hoieval

#pragma once

// Shared 3D math for every metric: alignments, rotation distance,
// projection, surface sampling and nearest-neighbour distances.
// All lengths are meters.

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace hoieval {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kRotationTolerance = 1e-6;

struct RigidPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidPose identity() { return {}; }
  Vec3 apply(const Vec3 &p) const { return rotation * p + translation; }
  RigidPose inverse() const;
};

// Composition a*b applies b first.
RigidPose operator*(const RigidPose &a, const RigidPose &b);

struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static SimilarityTransform identity() { return {}; }
  Vec3 apply(const Vec3 &p) const { return scale * (rotation * p) + translation; }
  SimilarityTransform inverse() const;
};

SimilarityTransform operator*(const SimilarityTransform &a,
                              const SimilarityTransform &b);

using Face = std::array<std::uint32_t, 3>;

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
};

using PointCloud = std::vector<Vec3>;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

// Validation helpers. `ensure_*` throw, `is_*` report.
bool is_rotation(const Mat3 &r, double tol = kRotationTolerance);
void ensure_rotation(const Mat3 &r, const char *what);
void ensure_finite(const Vec3 &v, const char *what);
void ensure_intrinsics(const CameraIntrinsics &k);
// Face indices in range and no repeated index within a face.
void ensure_mesh(const TriMesh &mesh);

Mat3 axis_angle(const Vec3 &axis, double angle_rad);

PointCloud transform_points(const RigidPose &pose, std::span<const Vec3> pts);
PointCloud transform_points(const SimilarityTransform &t,
                            std::span<const Vec3> pts);
TriMesh transform_mesh(const SimilarityTransform &t, const TriMesh &mesh);

// Least-squares rigid fit of src onto dst (R·src + t ≈ dst), det(R) = +1.
RigidPose kabsch_rigid(std::span<const Vec3> src, std::span<const Vec3> dst);

// Least-squares similarity fit (s·R·src + t ≈ dst), det(R) = +1.
SimilarityTransform procrustes_similarity(std::span<const Vec3> src,
                                          std::span<const Vec3> dst);

// Geodesic distance on SO(3) in radians, in [0, pi].
double geodesic_so3(const Mat3 &a, const Mat3 &b);

Vec2 project(const CameraIntrinsics &k, const Vec3 &p);

// Area-weighted uniform sampling of the surface. Deterministic per seed.
PointCloud sample_surface(const TriMesh &mesh, std::size_t n,
                          std::uint64_t seed);

double triangle_area(const Vec3 &a, const Vec3 &b, const Vec3 &c);

// Symmetric mean nearest-neighbour distance (unsquared), KD-tree backed.
double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);

// Largest pairwise vertex distance.
double mesh_diameter(const TriMesh &mesh);

inline double rad_to_deg(double r) { return r * (180.0 / kPi); }
inline double deg_to_rad(double d) { return d * (kPi / 180.0); }

}  // namespace hoieval

#pragma once

// Slow, direct evaluations used as oracles by the synthetic benchmark and
// the tests. They share no numeric code with the product metrics beyond
// the Eigen basics.

#include <span>
#include <vector>

#include "hoieval/geom.hpp"

namespace hoieval::reference {

// Every pair distance, no spatial index.
double chamfer_bruteforce(std::span<const Vec3> a, std::span<const Vec3> b);

// Exact as well, but scans sorted points outwards and stops once a 1D gap
// alone rules out the rest. Fast enough for 6000-point clouds.
double chamfer_sweep(std::span<const Vec3> a, std::span<const Vec3> b);

// Closed-form unit-quaternion alignment (largest eigenvector of the 4x4
// correlation matrix), with the least-squares scale.
SimilarityTransform horn_similarity(std::span<const Vec3> src, std::span<const Vec3> dst);

// Rotation angle of aᵀb via its quaternion, radians.
double quaternion_angle(const Mat3 &a, const Mat3 &b);

double diameter_bruteforce(std::span<const Vec3> vertices);

// Object errors by enumerating every (symmetry, vertex) pair. `symmetries`
// is the explicit group, identity included.
double mssd_exhaustive(const RigidPose &pred, const RigidPose &gt,
                       std::span<const Vec3> vertices, std::span<const Mat3> symmetries);
double mspd_exhaustive(const RigidPose &pred, const RigidPose &gt,
                       std::span<const Vec3> vertices, std::span<const Mat3> symmetries,
                       const CameraIntrinsics &k);
double re_exhaustive_deg(const Mat3 &pred_r, const Mat3 &gt_r, std::span<const Mat3> symmetries);

// Human errors, mm. PCK counts joints with error < threshold.
std::vector<double> joint_errors_mm(std::span<const Vec3> pred, std::span<const Vec3> gt);
std::size_t pck_count(std::span<const double> errors_mm, double threshold_mm);

}  // namespace hoieval::reference

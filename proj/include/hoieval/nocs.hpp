#pragma once

// Canonical-space rendering and the small decoders that sit around it:
// NOCS normalization, a z-buffered NOCS/mask rasterizer, mask -> RoI,
// heatmap soft-argmax and keypoint template fitting.

#include <cstdint>
#include <span>
#include <vector>

#include "hoieval/geom.hpp"
#include "hoieval/image.hpp"

namespace hoieval {

struct NocsNormalization {
  TriMesh mesh;  // vertices in [-1, 1], max-extent axis touching +-1
  Vec3 center = Vec3::Zero();
  double half_extent = 1.0;

  // Canonical point back to the input frame.
  Vec3 denormalize(const Vec3 &c) const { return c * half_extent + center; }
};

NocsNormalization normalize_to_nocs(const TriMesh &mesh);

struct NocsRender {
  ImageBuffer nocs;            // 3 channels, 0 on background
  ImageBuffer mask;            // 1 channel, 255 on foreground
  std::vector<double> depth;   // camera z per pixel, +inf on background
};

// Pixel (i, j) samples the image point u = i, v = j. Triangles are clipped
// at the near plane; an object entirely behind the camera renders empty.
NocsRender render_nocs(const TriMesh &canonical, const RigidPose &pose,
                       const CameraIntrinsics &k, int width, int height);

std::uint8_t encode_nocs(double coord);
double decode_nocs(std::uint8_t value);

struct BoundingBox {
  Vec2 center = Vec2::Zero();
  double width = 0.0;
  double height = 0.0;
};

// Tight box around mask > 0, grown by `scale` and jittered at the centre by
// N(0, sigma) per axis. Not clipped to the image.
BoundingBox mask_to_roi(const ImageBuffer &mask, double scale = 1.5,
                        double center_noise_sigma = 0.0, std::uint64_t seed = 0);

// Dense grid of non-negative values, x fastest. Voxel index n along an axis
// maps linearly onto [lo, hi] of that axis.
struct Heatmap3D {
  int size_x = 0;
  int size_y = 0;
  int size_z = 0;
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
  std::vector<double> values;

  Heatmap3D() = default;
  Heatmap3D(int nx, int ny, int nz, const Vec3 &lo, const Vec3 &hi, double fill = 0.0);

  double &at(int x, int y, int z) { return values[index(x, y, z)]; }
  double at(int x, int y, int z) const { return values[index(x, y, z)]; }
  Vec3 coord(int x, int y, int z) const;

 private:
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * size_y + y) * size_x + x;
  }
};

Vec3 soft_argmax_3d(const Heatmap3D &h);

RigidPose fit_template_keypoints(std::span<const Vec3> template_kps,
                                 std::span<const Vec3> predicted_kps);

// n^3 rotations over ZYX Euler angles (R = Rz(yaw) Ry(pitch) Rx(roll)).
// Yaw and roll sweep [-pi, pi), pitch takes cell centres of [-pi/2, pi/2].
std::vector<RigidPose> euler_grid(int n = 20);

}  // namespace hoieval

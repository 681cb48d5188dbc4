#include "hoieval/nocs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "hoieval/errors.hpp"
#include "hoieval/rng.hpp"

namespace hoieval {

NocsNormalization normalize_to_nocs(const TriMesh &mesh) {
  if (mesh.vertices.empty()) throw Error(ErrorKind::kEmptyMesh, "cannot normalize an empty mesh");
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const auto &v : mesh.vertices) {
    ensure_finite(v, "mesh vertex");
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double h = 0.5 * (hi - lo).maxCoeff();
  if (!(h > 0.0)) throw Error(ErrorKind::kZeroExtent, "all mesh vertices coincide");
  NocsNormalization out;
  out.center = 0.5 * (lo + hi);
  out.half_extent = h;
  out.mesh.faces = mesh.faces;
  out.mesh.vertices.reserve(mesh.vertices.size());
  for (const auto &v : mesh.vertices) {
    Vec3 c = (v - out.center) / h;
    out.mesh.vertices.push_back(c.cwiseMax(-1.0).cwiseMin(1.0));
  }
  return out;
}

std::uint8_t encode_nocs(double coord) {
  const double v = std::round((coord + 1.0) * 0.5 * 255.0);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

double decode_nocs(std::uint8_t value) { return value / 255.0 * 2.0 - 1.0; }

namespace {

constexpr double kNear = 1e-6;

struct ClipVertex {
  Vec3 cam;    // camera-space position
  Vec3 attr;   // canonical coordinate
};

// Sutherland-Hodgman against z >= kNear. Attributes are affine in camera
// space, so interpolating them alongside the position is exact.
int clip_near(const std::array<ClipVertex, 3> &tri, std::array<ClipVertex, 4> &out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const ClipVertex &a = tri[i];
    const ClipVertex &b = tri[(i + 1) % 3];
    const bool a_in = a.cam.z() >= kNear;
    const bool b_in = b.cam.z() >= kNear;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double s = (kNear - a.cam.z()) / (b.cam.z() - a.cam.z());
      ClipVertex c{a.cam + s * (b.cam - a.cam), a.attr + s * (b.attr - a.attr)};
      c.cam.z() = kNear;
      out[n++] = c;
    }
  }
  return n;
}

struct ScreenVertex {
  double u, v;
  double inv_z;
  Vec3 attr_over_z;
};

inline double edge(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

void raster_triangle(const ScreenVertex &a, const ScreenVertex &b, const ScreenVertex &c,
                     NocsRender &out) {
  const double area = edge(a.u, a.v, b.u, b.v, c.u, c.v);
  if (area == 0.0 || !std::isfinite(area)) return;
  const int w = out.mask.width;
  const int h = out.mask.height;
  const double min_u = std::min({a.u, b.u, c.u});
  const double max_u = std::max({a.u, b.u, c.u});
  const double min_v = std::min({a.v, b.v, c.v});
  const double max_v = std::max({a.v, b.v, c.v});
  const int x0 = static_cast<int>(std::max(0.0, std::ceil(min_u)));
  const int x1 = static_cast<int>(std::min(w - 1.0, std::floor(max_u)));
  const int y0 = static_cast<int>(std::max(0.0, std::ceil(min_v)));
  const int y1 = static_cast<int>(std::min(h - 1.0, std::floor(max_v)));
  const double inv_area = 1.0 / area;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double px = x;
      const double py = y;
      const double l0 = edge(b.u, b.v, c.u, c.v, px, py) * inv_area;
      const double l1 = edge(c.u, c.v, a.u, a.v, px, py) * inv_area;
      const double l2 = edge(a.u, a.v, b.u, b.v, px, py) * inv_area;
      if (l0 < 0.0 || l1 < 0.0 || l2 < 0.0) continue;
      const double inv_z = l0 * a.inv_z + l1 * b.inv_z + l2 * c.inv_z;
      const double z = 1.0 / inv_z;
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!(z < out.depth[idx])) continue;
      out.depth[idx] = z;
      const Vec3 attr = (l0 * a.attr_over_z + l1 * b.attr_over_z + l2 * c.attr_over_z) * z;
      for (int ch = 0; ch < 3; ++ch) out.nocs.at(x, y, ch) = encode_nocs(attr[ch]);
      out.mask.at(x, y) = 255;
    }
  }
}

}  // namespace

NocsRender render_nocs(const TriMesh &canonical, const RigidPose &pose,
                       const CameraIntrinsics &k, int width, int height) {
  ensure_mesh(canonical);
  ensure_intrinsics(k);
  ensure_rotation(pose.rotation, "render pose rotation");
  ensure_finite(pose.translation, "render pose translation");
  NocsRender out;
  out.nocs = ImageBuffer(width, height, 3);
  out.mask = ImageBuffer(width, height, 1);
  out.depth.assign(static_cast<std::size_t>(width) * height,
                   std::numeric_limits<double>::infinity());

  std::vector<Vec3> cam(canonical.vertices.size());
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = pose.apply(canonical.vertices[i]);

  auto to_screen = [&](const ClipVertex &cv) {
    const double iz = 1.0 / cv.cam.z();
    return ScreenVertex{k.fx * cv.cam.x() * iz + k.cx, k.fy * cv.cam.y() * iz + k.cy, iz,
                        cv.attr * iz};
  };

  std::array<ClipVertex, 4> poly;
  for (const Face &f : canonical.faces) {
    const std::array<ClipVertex, 3> tri{ClipVertex{cam[f[0]], canonical.vertices[f[0]]},
                                        ClipVertex{cam[f[1]], canonical.vertices[f[1]]},
                                        ClipVertex{cam[f[2]], canonical.vertices[f[2]]}};
    const int n = clip_near(tri, poly);
    if (n < 3) continue;
    const ScreenVertex s0 = to_screen(poly[0]);
    for (int i = 1; i + 1 < n; ++i) {
      raster_triangle(s0, to_screen(poly[i]), to_screen(poly[i + 1]), out);
    }
  }
  return out;
}

BoundingBox mask_to_roi(const ImageBuffer &mask, double scale, double center_noise_sigma,
                        std::uint64_t seed) {
  ensure_image(mask);
  if (mask.channels != 1) throw Error(ErrorKind::kInvalidArgument, "mask must have one channel");
  if (!(scale > 0.0)) throw Error(ErrorKind::kInvalidArgument, "RoI scale must be positive");
  if (!(center_noise_sigma >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "RoI centre noise sigma must be >= 0");
  }
  int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y) == 0) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(ErrorKind::kEmptyMask, "mask has no foreground pixel");
  BoundingBox box;
  box.center = Vec2(0.5 * (x0 + x1), 0.5 * (y0 + y1));
  if (center_noise_sigma > 0.0) {
    Rng rng(seed);
    box.center.x() += rng.normal(0.0, center_noise_sigma);
    box.center.y() += rng.normal(0.0, center_noise_sigma);
  }
  box.width = (x1 - x0 + 1) * scale;
  box.height = (y1 - y0 + 1) * scale;
  return box;
}

Heatmap3D::Heatmap3D(int nx, int ny, int nz, const Vec3 &lo_, const Vec3 &hi_, double fill)
    : size_x(nx), size_y(ny), size_z(nz), lo(lo_), hi(hi_) {
  if (nx <= 0 || ny <= 0 || nz <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "heatmap dimensions must be positive");
  }
  values.assign(static_cast<std::size_t>(nx) * ny * nz, fill);
}

Vec3 Heatmap3D::coord(int x, int y, int z) const {
  auto axis = [](int i, int n, double a, double b) {
    return n == 1 ? 0.5 * (a + b) : a + (b - a) * (static_cast<double>(i) / (n - 1));
  };
  return {axis(x, size_x, lo.x(), hi.x()), axis(y, size_y, lo.y(), hi.y()),
          axis(z, size_z, lo.z(), hi.z())};
}

Vec3 soft_argmax_3d(const Heatmap3D &h) {
  if (h.values.size() != static_cast<std::size_t>(h.size_x) * h.size_y * h.size_z ||
      h.values.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "heatmap value count does not match its dimensions");
  }
  double peak = 0.0;
  for (double v : h.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidArgument, "heatmap values must be finite and non-negative");
    }
    peak = std::max(peak, v);
  }
  if (peak == 0.0) throw Error(ErrorKind::kAllZero, "heatmap has no positive value");

  double total = 0.0;
  Vec3 acc = Vec3::Zero();
  std::size_t i = 0;
  for (int z = 0; z < h.size_z; ++z) {
    for (int y = 0; y < h.size_y; ++y) {
      for (int x = 0; x < h.size_x; ++x, ++i) {
        const double w = std::exp(h.values[i] - peak);
        if (w == 0.0) continue;
        total += w;
        acc += w * h.coord(x, y, z);
      }
    }
  }
  const Vec3 lo = h.lo.cwiseMin(h.hi);
  const Vec3 hi = h.lo.cwiseMax(h.hi);
  return (acc / total).cwiseMax(lo).cwiseMin(hi);
}

RigidPose fit_template_keypoints(std::span<const Vec3> template_kps,
                                 std::span<const Vec3> predicted_kps) {
  return kabsch_rigid(template_kps, predicted_kps);
}

std::vector<RigidPose> euler_grid(int n) {
  if (n <= 0) throw Error(ErrorKind::kInvalidArgument, "euler grid resolution must be positive");
  std::vector<RigidPose> poses;
  poses.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    const double yaw = -kPi + 2.0 * kPi * i / n;
    for (int j = 0; j < n; ++j) {
      const double pitch = -0.5 * kPi + kPi * (j + 0.5) / n;
      for (int l = 0; l < n; ++l) {
        const double roll = -kPi + 2.0 * kPi * l / n;
        RigidPose p;
        p.rotation = axis_angle(Vec3::UnitZ(), yaw) * axis_angle(Vec3::UnitY(), pitch) *
                     axis_angle(Vec3::UnitX(), roll);
        poses.push_back(p);
      }
    }
  }
  return poses;
}

}  // namespace hoieval

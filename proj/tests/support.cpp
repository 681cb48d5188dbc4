#include "support.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace testing {

namespace fs = std::filesystem;

Mat3 random_rotation(Rng &rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return q.normalized().toRotationMatrix();
}

Vec3 random_unit(Rng &rng) {
  for (;;) {
    const Vec3 v(rng.normal(), rng.normal(), rng.normal());
    if (v.norm() > 1e-6) return v.normalized();
  }
}

Vec3 random_vec(Rng &rng, double half_range) {
  return Vec3(rng.uniform(-half_range, half_range), rng.uniform(-half_range, half_range),
              rng.uniform(-half_range, half_range));
}

PointCloud random_cloud(Rng &rng, std::size_t n, double half_range) {
  PointCloud out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_vec(rng, half_range));
  return out;
}

hoieval::RigidPose random_pose(Rng &rng, double half_range) {
  return {random_rotation(rng), random_vec(rng, half_range)};
}

hoieval::SimilarityTransform random_similarity(Rng &rng) {
  return {rng.uniform(0.5, 2.0), random_rotation(rng), random_vec(rng, 1.0)};
}

TempDir::TempDir(const std::string &tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("hoieval_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_bytes(const fs::path &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_text(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
}

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace testing

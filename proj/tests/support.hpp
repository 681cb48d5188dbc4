#pragma once

// Shared fixtures for the unit and acceptance binaries.

#include <filesystem>
#include <string>
#include <vector>

#include "hoieval/geom.hpp"
#include "hoieval/rng.hpp"

namespace testing {

using hoieval::Mat3;
using hoieval::PointCloud;
using hoieval::Rng;
using hoieval::Vec3;

// Uniform on SO(3) via a normalized Gaussian quaternion.
Mat3 random_rotation(Rng &rng);
Vec3 random_unit(Rng &rng);
Vec3 random_vec(Rng &rng, double half_range);
PointCloud random_cloud(Rng &rng, std::size_t n, double half_range);
hoieval::RigidPose random_pose(Rng &rng, double half_range);
hoieval::SimilarityTransform random_similarity(Rng &rng);

// Fresh, empty directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  explicit TempDir(const std::string &tag);
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_bytes(const std::filesystem::path &path);
void write_text(const std::filesystem::path &path, const std::string &text);

// Relative difference, with the denominator floored at 1e-300.
double rel_diff(double a, double b);

}  // namespace testing

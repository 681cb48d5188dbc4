#pragma once

// Seeded photometric augmentation of 8-bit images. Each op fires with its
// own probability and draws its parameters from one stream, in order.

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <variant>
#include <vector>

#include "hoieval/image.hpp"

namespace hoieval {

struct CoarseDropout {
  int holes_min = 1, holes_max = 1;
  int width_min = 8, width_max = 8;     // pixels
  int height_min = 8, height_max = 8;
  std::uint8_t fill = 0;
};

struct GaussianBlur {
  double sigma_min = 0.5, sigma_max = 1.5;  // pixels; kernel cut at 3 sigma
};

// v + a, a ~ U[min, max] drawn per pixel (per sample with per_channel).
struct AddNoise {
  double min = -20.0, max = 20.0;
  bool per_channel = false;
};

struct Invert {};

// v * m, m ~ U[min, max] drawn per pixel (per sample with per_channel).
struct Multiply {
  double min = 0.8, max = 1.2;
  bool per_channel = false;
};

// alpha * (v - 128) + 128, alpha ~ U[alpha_min, alpha_max] once per image.
struct ContrastNormalization {
  double alpha_min = 0.5, alpha_max = 1.5;
};

using AugmentOp =
    std::variant<CoarseDropout, GaussianBlur, AddNoise, Invert, Multiply, ContrastNormalization>;

struct AugmentSpec {
  double probability = 1.0;
  AugmentOp op;
};

struct Hole {
  int x, y, width, height;
};

struct AugmentTrace {
  bool applied = false;
  std::vector<Hole> holes;  // coarse dropout only
  double parameter = 0.0;   // blur sigma or contrast alpha when applied
};

ImageBuffer augment(const ImageBuffer &img, const std::vector<AugmentSpec> &ops,
                    std::uint64_t seed);
ImageBuffer augment_with_trace(const ImageBuffer &img, const std::vector<AugmentSpec> &ops,
                               std::uint64_t seed, std::vector<AugmentTrace> &trace);

// Pipeline document: {"schema_version": 1, "ops": [{"op": name, "p": ..., ...}]}.
std::vector<AugmentSpec> pipeline_from_json(const nlohmann::json &doc);
nlohmann::json pipeline_to_json(const std::vector<AugmentSpec> &ops);
std::vector<AugmentSpec> load_pipeline(const std::filesystem::path &path);

}  // namespace hoieval

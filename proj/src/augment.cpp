#include "hoieval/augment.hpp"

#include <algorithm>
#include <cmath>

#include "hoieval/dataset.hpp"
#include "hoieval/errors.hpp"
#include "hoieval/rng.hpp"

namespace hoieval {

using nlohmann::json;

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

int int_between(Rng &rng, int lo, int hi) {
  return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo) + 1));
}

void check_range(double lo, double hi, const char *what) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + ": need finite min <= max");
  }
}

void check_spec(const AugmentSpec &s) {
  if (!(s.probability >= 0.0 && s.probability <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "augment probability must lie in [0, 1]");
  }
  std::visit(
      [](const auto &op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, CoarseDropout>) {
          if (op.holes_min < 0 || op.holes_min > op.holes_max || op.width_min < 1 ||
              op.width_min > op.width_max || op.height_min < 1 || op.height_min > op.height_max) {
            throw Error(ErrorKind::kInvalidArgument, "coarse_dropout: bad hole ranges");
          }
        } else if constexpr (std::is_same_v<T, GaussianBlur>) {
          check_range(op.sigma_min, op.sigma_max, "gaussian_blur sigma");
          if (op.sigma_min < 0.0) throw Error(ErrorKind::kInvalidArgument, "gaussian_blur: sigma < 0");
        } else if constexpr (std::is_same_v<T, AddNoise> || std::is_same_v<T, Multiply>) {
          check_range(op.min, op.max, "noise range");
        } else if constexpr (std::is_same_v<T, ContrastNormalization>) {
          check_range(op.alpha_min, op.alpha_max, "contrast alpha");
        }
      },
      s.op);
}

void apply(const CoarseDropout &op, ImageBuffer &img, Rng &rng, AugmentTrace &t) {
  const int holes = int_between(rng, op.holes_min, op.holes_max);
  for (int i = 0; i < holes; ++i) {
    const int w = std::min(int_between(rng, op.width_min, op.width_max), img.width);
    const int h = std::min(int_between(rng, op.height_min, op.height_max), img.height);
    const int x = int_between(rng, 0, img.width - w);
    const int y = int_between(rng, 0, img.height - h);
    t.holes.push_back({x, y, w, h});
    for (int yy = y; yy < y + h; ++yy) {
      for (int xx = x; xx < x + w; ++xx) {
        for (int c = 0; c < img.channels; ++c) img.at(xx, yy, c) = op.fill;
      }
    }
  }
}

void apply(const GaussianBlur &op, ImageBuffer &img, Rng &rng, AugmentTrace &t) {
  const double sigma = rng.uniform(op.sigma_min, op.sigma_max);
  t.parameter = sigma;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  if (r == 0) return;
  std::vector<double> kernel(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    kernel[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += kernel[i + r];
  }
  for (double &k : kernel) k /= sum;

  const int w = img.width, h = img.height, ch = img.channels;
  std::vector<double> tmp(img.data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += kernel[i + r] * img.at(std::clamp(x + i, 0, w - 1), y, c);
        tmp[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          acc += kernel[i + r] * tmp[(static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x) * ch + c];
        }
        img.at(x, y, c) = to_byte(acc);
      }
    }
  }
}

template <typename F>
void per_pixel(ImageBuffer &img, Rng &rng, double lo, double hi, bool per_channel, F f) {
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double a = rng.uniform(lo, hi);
      for (int c = 0; c < img.channels; ++c) {
        if (per_channel && c > 0) a = rng.uniform(lo, hi);
        img.at(x, y, c) = to_byte(f(img.at(x, y, c), a));
      }
    }
  }
}

void apply(const AddNoise &op, ImageBuffer &img, Rng &rng, AugmentTrace &) {
  per_pixel(img, rng, op.min, op.max, op.per_channel, [](double v, double a) { return v + a; });
}

void apply(const Invert &, ImageBuffer &img, Rng &, AugmentTrace &) {
  for (auto &v : img.data) v = static_cast<std::uint8_t>(255 - v);
}

void apply(const Multiply &op, ImageBuffer &img, Rng &rng, AugmentTrace &) {
  per_pixel(img, rng, op.min, op.max, op.per_channel, [](double v, double m) { return v * m; });
}

void apply(const ContrastNormalization &op, ImageBuffer &img, Rng &rng, AugmentTrace &t) {
  const double alpha = rng.uniform(op.alpha_min, op.alpha_max);
  t.parameter = alpha;
  for (auto &v : img.data) v = to_byte(alpha * (v - 128.0) + 128.0);
}

}  // namespace

ImageBuffer augment_with_trace(const ImageBuffer &img, const std::vector<AugmentSpec> &ops,
                               std::uint64_t seed, std::vector<AugmentTrace> &trace) {
  ensure_image(img);
  for (const auto &s : ops) check_spec(s);
  ImageBuffer out = img;
  Rng rng(seed);
  trace.assign(ops.size(), AugmentTrace{});
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (!(rng.uniform() < ops[i].probability)) continue;
    trace[i].applied = true;
    std::visit([&](const auto &op) { apply(op, out, rng, trace[i]); }, ops[i].op);
  }
  return out;
}

ImageBuffer augment(const ImageBuffer &img, const std::vector<AugmentSpec> &ops,
                    std::uint64_t seed) {
  std::vector<AugmentTrace> trace;
  return augment_with_trace(img, ops, seed, trace);
}

namespace {

std::pair<double, double> range_of(const json &j, const char *key, std::pair<double, double> dflt) {
  if (!j.contains(key)) return dflt;
  const json &r = j.at(key);
  if (r.is_number()) return {r.get<double>(), r.get<double>()};
  if (!r.is_array() || r.size() != 2) {
    throw Error(ErrorKind::kParseError, std::string("'") + key + "' must be a number or [min, max]");
  }
  return {r[0].get<double>(), r[1].get<double>()};
}

std::pair<int, int> int_range_of(const json &j, const char *key, std::pair<int, int> dflt) {
  const auto [a, b] = range_of(j, key, {dflt.first, dflt.second});
  if (a != std::floor(a) || b != std::floor(b)) {
    throw Error(ErrorKind::kParseError, std::string("'") + key + "' must hold integers");
  }
  return {static_cast<int>(a), static_cast<int>(b)};
}

}  // namespace

std::vector<AugmentSpec> pipeline_from_json(const json &doc) {
  std::vector<AugmentSpec> ops;
  try {
    if (doc.value("schema_version", 0) != kSchemaVersion) {
      throw Error(ErrorKind::kParseError, "pipeline schema_version must be 1");
    }
    for (const auto &j : doc.at("ops")) {
      AugmentSpec s;
      s.probability = j.value("p", 1.0);
      const std::string name = j.at("op").get<std::string>();
      if (name == "coarse_dropout") {
        CoarseDropout op;
        std::tie(op.holes_min, op.holes_max) = int_range_of(j, "holes", {op.holes_min, op.holes_max});
        std::tie(op.width_min, op.width_max) = int_range_of(j, "width", {op.width_min, op.width_max});
        std::tie(op.height_min, op.height_max) =
            int_range_of(j, "height", {op.height_min, op.height_max});
        const int fill = j.value("fill", 0);
        if (fill < 0 || fill > 255) throw Error(ErrorKind::kParseError, "fill must lie in [0, 255]");
        op.fill = static_cast<std::uint8_t>(fill);
        s.op = op;
      } else if (name == "gaussian_blur") {
        GaussianBlur op;
        std::tie(op.sigma_min, op.sigma_max) = range_of(j, "sigma", {op.sigma_min, op.sigma_max});
        s.op = op;
      } else if (name == "add") {
        AddNoise op;
        std::tie(op.min, op.max) = range_of(j, "range", {op.min, op.max});
        op.per_channel = j.value("per_channel", false);
        s.op = op;
      } else if (name == "invert") {
        s.op = Invert{};
      } else if (name == "multiply") {
        Multiply op;
        std::tie(op.min, op.max) = range_of(j, "range", {op.min, op.max});
        op.per_channel = j.value("per_channel", false);
        s.op = op;
      } else if (name == "contrast_normalization") {
        ContrastNormalization op;
        std::tie(op.alpha_min, op.alpha_max) = range_of(j, "alpha", {op.alpha_min, op.alpha_max});
        s.op = op;
      } else {
        throw Error(ErrorKind::kParseError, "unknown augment op '" + name + "'");
      }
      check_spec(s);
      ops.push_back(s);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParseError, std::string("augment pipeline: ") + e.what());
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::kParseError) throw;
    throw Error(ErrorKind::kParseError, std::string("augment pipeline: ") + e.what());
  }
  return ops;
}

json pipeline_to_json(const std::vector<AugmentSpec> &ops) {
  json list = json::array();
  for (const auto &s : ops) {
    json j;
    j["p"] = s.probability;
    std::visit(
        [&j](const auto &op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, CoarseDropout>) {
            j["op"] = "coarse_dropout";
            j["holes"] = {op.holes_min, op.holes_max};
            j["width"] = {op.width_min, op.width_max};
            j["height"] = {op.height_min, op.height_max};
            j["fill"] = op.fill;
          } else if constexpr (std::is_same_v<T, GaussianBlur>) {
            j["op"] = "gaussian_blur";
            j["sigma"] = {op.sigma_min, op.sigma_max};
          } else if constexpr (std::is_same_v<T, AddNoise>) {
            j["op"] = "add";
            j["range"] = {op.min, op.max};
            j["per_channel"] = op.per_channel;
          } else if constexpr (std::is_same_v<T, Invert>) {
            j["op"] = "invert";
          } else if constexpr (std::is_same_v<T, Multiply>) {
            j["op"] = "multiply";
            j["range"] = {op.min, op.max};
            j["per_channel"] = op.per_channel;
          } else {
            j["op"] = "contrast_normalization";
            j["alpha"] = {op.alpha_min, op.alpha_max};
          }
        },
        s.op);
    list.push_back(std::move(j));
  }
  return {{"schema_version", kSchemaVersion}, {"ops", std::move(list)}};
}

std::vector<AugmentSpec> load_pipeline(const std::filesystem::path &path) {
  return pipeline_from_json(read_json_file(path));
}

}  // namespace hoieval

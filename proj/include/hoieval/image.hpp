#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace hoieval {

// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels, row-major.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, int c, std::uint8_t fill = 0);

  std::uint8_t &at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool empty() const { return data.empty(); }
};

void ensure_image(const ImageBuffer &img);

ImageBuffer read_png(const std::filesystem::path &path);
void write_png(const ImageBuffer &img, const std::filesystem::path &path);

}  // namespace hoieval

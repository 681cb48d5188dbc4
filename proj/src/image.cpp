#include "hoieval/image.hpp"

#include <png.h>

#include <string>

#include "hoieval/errors.hpp"

namespace hoieval {

namespace {

void check_shape(int w, int h, int c) {
  if (w <= 0 || h <= 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "image size must be positive, got " + std::to_string(w) + "x" + std::to_string(h));
  }
  if (c != 1 && c != 3) {
    throw Error(ErrorKind::kInvalidArgument, "image channels must be 1 or 3");
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c) {
  check_shape(w, h, c);
  data.assign(static_cast<std::size_t>(w) * h * c, fill);
}

void ensure_image(const ImageBuffer &img) {
  check_shape(img.width, img.height, img.channels);
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw Error(ErrorKind::kInvalidArgument, "image sample count does not match W*H*C");
  }
}

ImageBuffer read_png(const std::filesystem::path &path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw Error(ErrorKind::kIoError, path.string() + ": " + png.message);
  }
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  ImageBuffer img(static_cast<int>(png.width), static_cast<int>(png.height), gray ? 1 : 3);
  if (!png_image_finish_read(&png, nullptr, img.data.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorKind::kIoError, path.string() + ": " + msg);
  }
  return img;
}

void write_png(const ImageBuffer &img, const std::filesystem::path &path) {
  ensure_image(img);
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, img.data.data(), 0, nullptr)) {
    throw Error(ErrorKind::kIoError, path.string() + ": " + png.message);
  }
}

}  // namespace hoieval

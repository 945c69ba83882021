#include "gap/raster.hpp"

#include <png.h>

#include <cstring>
#include <string>

#include "gap/error.hpp"

namespace gap {

double luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

LuminanceRaster to_luminance(const Raster8& image) {
  LuminanceRaster out;
  out.size = image.size;
  const std::size_t n = image.size.width * image.size.height;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (image.channels == 1) {
      out.values[i] = image.data[i];
    } else {
      const auto* px = &image.data[i * image.channels];
      out.values[i] = luminance(px[0], px[1], px[2]);
    }
  }
  return out;
}

namespace {

class PngReader {
 public:
  explicit PngReader(const std::filesystem::path& path) : path_(path) {
    std::memset(&image_, 0, sizeof image_);
    image_.version = PNG_IMAGE_VERSION;
    if (!std::filesystem::exists(path)) throw IoError("cannot open " + path.string());
    if (png_image_begin_read_from_file(&image_, path.c_str()) == 0) {
      throw FormatError(path.string() + ": not a readable PNG (" + image_.message + ")");
    }
    if ((image_.format & PNG_FORMAT_FLAG_LINEAR) != 0) {
      png_image_free(&image_);
      throw FormatError(path.string() + ": 16-bit PNG not supported");
    }
  }
  ~PngReader() { png_image_free(&image_); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  ImageSize size() const { return {image_.width, image_.height}; }

  Raster8 read() {
    const bool color = (image_.format & PNG_FORMAT_FLAG_COLOR) != 0;
    const bool alpha = (image_.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    image_.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB)
                          : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
    const std::size_t src_channels = PNG_IMAGE_SAMPLE_CHANNELS(image_.format);
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image_));
    if (png_image_finish_read(&image_, nullptr, buffer.data(), 0, nullptr) == 0) {
      throw FormatError(path_.string() + ": " + image_.message);
    }
    Raster8 out;
    out.size = size();
    out.channels = color ? 3 : 1;
    if (!alpha) {
      out.data = std::move(buffer);
      return out;
    }
    const std::size_t n = out.size.width * out.size.height;
    out.data.resize(n * out.channels);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < out.channels; ++c) {
        out.data[i * out.channels + c] = buffer[i * src_channels + c];
      }
    }
    return out;
  }

 private:
  std::filesystem::path path_;
  png_image image_;
};

}  // namespace

Raster8 read_png(const std::filesystem::path& path) { return PngReader(path).read(); }

ImageSize read_png_size(const std::filesystem::path& path) { return PngReader(path).size(); }

void write_png(const std::filesystem::path& path, const Raster8& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw ContractError("write_png: channels must be 1 or 3");
  }
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.size.width);
  img.height = static_cast<png_uint_32>(image.size.height);
  img.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (png_image_write_to_file(&img, path.c_str(), 0, image.data.data(), 0, nullptr) == 0) {
    std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot write " + path.string() + ": " + msg);
  }
}

}  // namespace gap

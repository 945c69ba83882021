#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace gap {

struct ImageSize {
  std::size_t width = 0;
  std::size_t height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels.
struct Raster8 {
  ImageSize size;
  std::size_t channels = 1;
  std::vector<std::uint8_t> data;

  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c = 0) const {
    return data[(y * size.width + x) * channels + c];
  }
};

// Real-valued single-channel image, row-major.
struct LuminanceRaster {
  ImageSize size;
  std::vector<double> values;

  double at(std::size_t x, std::size_t y) const { return values[y * size.width + x]; }
};

/// L = 0.299 R + 0.587 G + 0.114 B on 8-bit channels.
double luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

LuminanceRaster to_luminance(const Raster8& image);

// PNG only. Palette is expanded and alpha dropped; 16-bit input is rejected.
Raster8 read_png(const std::filesystem::path& path);
ImageSize read_png_size(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Raster8& image);

}  // namespace gap

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace vnkf {

// 8-bit single-channel raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  bool empty() const noexcept { return width <= 0 || height <= 0 || pixels.empty(); }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// 8-bit interleaved R,G,B raster, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}
};

// Reads PNG, JPEG or PGM. Colour inputs are reduced with to_grayscale().
// Throws Error{unreadable_image}.
GrayImage read_gray_image(const std::filesystem::path& path);

// Format chosen by extension: ".pgm" writes binary P5, anything else PNG.
// Throws Error{io_failure}.
void write_gray_image(const GrayImage& image, const std::filesystem::path& path);

}  // namespace vnkf

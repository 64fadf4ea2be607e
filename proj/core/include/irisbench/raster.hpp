#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace irisbench {

/// Row-major single-channel raster. Pixel (x, y) has its center at the
/// continuous coordinate (x, y).
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& at(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& at(int x, int y) const noexcept { return data_[index(x, y)]; }

  std::span<T> row(int y) noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Image8 = Raster<std::uint8_t>;
using ImageF = Raster<float>;

/// Bilinear sample with pixel centers on integer coordinates. Neighbors
/// outside the raster contribute zero.
double sample_bilinear_zero(const Image8& image, double x, double y) noexcept;
double sample_bilinear_zero(const ImageF& image, double x, double y) noexcept;

// 8-bit grayscale codecs. Binary PGM (P5) and PNG are supported; the
// format is chosen from the extension on write and from the magic bytes
// on read.
Image8 read_pgm(const std::filesystem::path& path);
void write_pgm(const Image8& image, const std::filesystem::path& path);
Image8 read_png(const std::filesystem::path& path);
void write_png(const Image8& image, const std::filesystem::path& path);
Image8 read_image(const std::filesystem::path& path);
void write_image(const Image8& image, const std::filesystem::path& path);

}  // namespace irisbench

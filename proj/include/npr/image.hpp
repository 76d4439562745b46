#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace npr {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row-major image, origin top-left.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  T& at(int x, int y) {
    assert(x >= 0 && y >= 0 && x < width_ && y < height_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& at(int x, int y) const {
    assert(x >= 0 && y >= 0 && x < width_ && y < height_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  bool same_size(int w, int h) const { return width_ == w && height_ == h; }
  template <typename U>
  bool same_size(const Image<U>& o) const {
    return width_ == o.width() && height_ == o.height();
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Brightness or darkness fields in [0,1].
using IntensityImage = Image<float>;
using LineImage = Image<float>;
// Per-pixel multiplier; 1 = no line.
using LineValueImage = Image<float>;

template <typename A, typename B>
void require_same_size(const Image<A>& a, const Image<B>& b, const char* what) {
  if (!a.same_size(b)) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                         std::to_string(b.height()) + ")");
  }
}

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(static_cast<int>(v * 255.0 + 0.5), 0, 255));
}

struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel
};

// Grayscale quantization with a channel-wise tint multiply.
Rgb8Image to_rgb8(const IntensityImage& img, const std::array<double, 3>& tint = {1.0, 1.0, 1.0});

std::vector<std::uint8_t> encode_png(const Rgb8Image& img);
std::vector<std::uint8_t> encode_png_gray(const IntensityImage& img);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Binary P5 with maxval 255, values scaled from [lo, hi].
void write_pgm(const std::filesystem::path& path, const IntensityImage& img, double lo = 0.0, double hi = 1.0);
IntensityImage read_pgm(const std::filesystem::path& path);

}  // namespace npr

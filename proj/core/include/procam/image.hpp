#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procam/error.hpp"

namespace procam {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct PixelCoord {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
  friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

struct Size {
  int width = 0;
  int height = 0;

  friend bool operator==(const Size&, const Size&) = default;
};

/// Dense row-major image. Row 0 is the top of the picture.
template <typename Pixel>
class Image {
 public:
  using pixel_type = Pixel;

  Image() = default;
  Image(int width, int height, Pixel fill = Pixel{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw InvalidArgument("image dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  explicit Image(Size size, Pixel fill = Pixel{}) : Image(size.width, size.height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  Size size() const { return {width_, height_}; }
  bool empty() const { return data_.empty(); }
  std::size_t pixel_count() const { return data_.size(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool contains(PixelCoord p) const { return contains(p.x, p.y); }

  Pixel& at(int x, int y) {
    assert(contains(x, y));
    return data_[index(x, y)];
  }
  const Pixel& at(int x, int y) const {
    assert(contains(x, y));
    return data_[index(x, y)];
  }
  Pixel& at(PixelCoord p) { return at(p.x, p.y); }
  const Pixel& at(PixelCoord p) const { return at(p.x, p.y); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<Pixel> pixels() { return data_; }
  std::span<const Pixel> pixels() const { return data_; }
  std::span<Pixel> row(int y) {
    return std::span<Pixel>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  std::span<const Pixel> row(int y) const {
    return std::span<const Pixel>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> data_;
};

using GrayImage = Image<std::uint8_t>;
using Gray16Image = Image<std::uint16_t>;
using RgbImage = Image<Rgb8>;
using FloatImage = Image<float>;
using BinaryImage = Image<std::uint8_t>;  // 0 or 1

/// Rec. 601 luma, 0..255 scale.
inline double luma(Rgb8 c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

GrayImage to_gray(const RgbImage& image);
RgbImage to_rgb(const GrayImage& image);

/// Parses "WxH" (e.g. "256x256"). Throws InvalidArgument on malformed text.
Size parse_size(std::string_view text);
std::string format_size(Size size);

}  // namespace procam

#include "procam/image.hpp"

#include <charconv>
#include <cmath>

namespace procam {

GrayImage to_gray(const RgbImage& image) {
  GrayImage out(image.width(), image.height());
  auto src = image.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>(std::lround(std::min(255.0, luma(src[i]))));
  }
  return out;
}

RgbImage to_rgb(const GrayImage& image) {
  RgbImage out(image.width(), image.height());
  auto src = image.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = Rgb8{src[i], src[i], src[i]};
  }
  return out;
}

Size parse_size(std::string_view text) {
  const auto sep = text.find_first_of("xX");
  if (sep == std::string_view::npos) {
    throw InvalidArgument("expected size as WxH, got '" + std::string(text) + "'");
  }
  Size size;
  const auto parse = [&](std::string_view part, int& value) {
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, value);
    if (ec != std::errc{} || ptr != end || value <= 0) {
      throw InvalidArgument("expected size as WxH, got '" + std::string(text) + "'");
    }
  };
  parse(text.substr(0, sep), size.width);
  parse(text.substr(sep + 1), size.height);
  return size;
}

std::string format_size(Size size) {
  return std::to_string(size.width) + "x" + std::to_string(size.height);
}

}  // namespace procam

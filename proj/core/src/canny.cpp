#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "procam/effects.hpp"

namespace procam::fx {
namespace {

Image<double> luminance(const RgbImage& image) {
  Image<double> out(image.size());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    out.pixels()[i] = luma(image.pixels()[i]);
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel;
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel.push_back(std::exp(-(i * i) / (2.0 * sigma * sigma)));
    sum += kernel.back();
  }
  for (auto& k : kernel) {
    k /= sum;
  }
  return kernel;
}

Image<double> blur(const Image<double>& src, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = src.width();
  const int h = src.height();
  Image<double> tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * src.at(std::clamp(x + i, 0, w - 1), y);
      }
      tmp.at(x, y) = acc;
    }
  }
  Image<double> out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(x, std::clamp(y + i, 0, h - 1));
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

// Trailing/leading neighbour offsets per direction bin.
struct BinOffsets {
  PixelCoord trailing;
  PixelCoord leading;
};
constexpr BinOffsets kBins[4] = {
    {{-1, 0}, {1, 0}},    // gradient ~horizontal
    {{-1, -1}, {1, 1}},   // ~45 degrees (y down)
    {{0, -1}, {0, 1}},    // ~vertical
    {{1, -1}, {-1, 1}},   // ~135 degrees
};

int direction_bin(double gx, double gy) {
  double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
  if (angle < 0.0) {
    angle += 180.0;
  }
  if (angle < 22.5 || angle >= 157.5) {
    return 0;
  }
  if (angle < 67.5) {
    return 1;
  }
  if (angle < 112.5) {
    return 2;
  }
  return 3;
}

}  // namespace

BinaryImage canny(const RgbImage& image, double sigma, double low, double high) {
  if (!(sigma > 0.0)) {
    throw InvalidArgument("canny sigma must be positive");
  }
  if (!(low >= 0.0 && low < high && high <= 1.0)) {
    throw InvalidArgument("canny thresholds need 0 <= low < high <= 1");
  }
  const int w = image.width();
  const int h = image.height();
  BinaryImage edges(w, h, 0);
  if (image.empty()) {
    return edges;
  }
  const auto smooth = blur(luminance(image), sigma);
  const auto B = [&](int x, int y) {
    return smooth.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };

  Image<double> magnitude(w, h);
  Image<std::uint8_t> bins(w, h);
  double peak = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (B(x + 1, y - 1) + 2.0 * B(x + 1, y) + B(x + 1, y + 1)) -
                        (B(x - 1, y - 1) + 2.0 * B(x - 1, y) + B(x - 1, y + 1));
      const double gy = (B(x - 1, y + 1) + 2.0 * B(x, y + 1) + B(x + 1, y + 1)) -
                        (B(x - 1, y - 1) + 2.0 * B(x, y - 1) + B(x + 1, y - 1));
      const double m = std::sqrt(gx * gx + gy * gy);
      magnitude.at(x, y) = m;
      bins.at(x, y) = static_cast<std::uint8_t>(direction_bin(gx, gy));
      peak = std::max(peak, m);
    }
  }
  if (!(peak > 0.0)) {
    return edges;
  }

  const auto mag_or_zero = [&](int x, int y) {
    return magnitude.contains(x, y) ? magnitude.at(x, y) : 0.0;
  };
  const double strong_level = high * peak;
  const double weak_level = low * peak;
  // 0 = suppressed, 1 = weak, 2 = strong
  Image<std::uint8_t> klass(w, h, 0);
  std::vector<PixelCoord> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = magnitude.at(x, y);
      if (!(m > 0.0)) {
        continue;
      }
      const auto& bin = kBins[bins.at(x, y)];
      const bool is_max = m > mag_or_zero(x + bin.trailing.x, y + bin.trailing.y) &&
                          m >= mag_or_zero(x + bin.leading.x, y + bin.leading.y);
      if (!is_max) {
        continue;
      }
      if (m >= strong_level) {
        klass.at(x, y) = 2;
        edges.at(x, y) = 1;
        stack.push_back({x, y});
      } else if (m >= weak_level) {
        klass.at(x, y) = 1;
      }
    }
  }
  while (!stack.empty()) {
    const PixelCoord p = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = p.x + dx;
        const int ny = p.y + dy;
        if (klass.contains(nx, ny) && klass.at(nx, ny) == 1 && edges.at(nx, ny) == 0) {
          edges.at(nx, ny) = 1;
          stack.push_back({nx, ny});
        }
      }
    }
  }
  return edges;
}

}  // namespace procam::fx

#include "procam/projimage.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>

#include "procam/parallel.hpp"

namespace procam::projimage {
namespace {

constexpr std::uint64_t kAxisOne = 1ULL << 16;
constexpr std::uint64_t kUnitWeight = kAxisOne * kAxisOne;

struct Accumulator {
  std::vector<std::uint64_t> weight;
  std::vector<std::array<std::uint64_t, 3>> color;

  explicit Accumulator(std::size_t n) : weight(n, 0), color(n, {0, 0, 0}) {}

  void merge(const Accumulator& other) {
    for (std::size_t i = 0; i < weight.size(); ++i) {
      weight[i] += other.weight[i];
      for (int c = 0; c < 3; ++c) {
        color[i][static_cast<std::size_t>(c)] += other.color[i][static_cast<std::size_t>(c)];
      }
    }
  }
};

// Splits a real coordinate into an integer cell and a 16-bit fraction.
std::pair<long long, std::uint64_t> split_coordinate(double v) {
  auto cell = static_cast<long long>(std::floor(v));
  auto frac = static_cast<std::uint64_t>(std::llround((v - static_cast<double>(cell)) * kAxisOne));
  if (frac == kAxisOne) {
    ++cell;
    frac = 0;
  }
  return {cell, frac};
}

void splat_rows(const sl::CorrespondenceMap& corr, const RgbImage& camera_color, Size projector,
                int row_begin, int row_end, Accumulator& acc) {
  const int width = corr.camera_size().width;
  for (int y = row_begin; y < row_end; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto& c = corr.at(x, y);
      if (!c.valid) {
        continue;
      }
      const auto [x0, fx] = split_coordinate(c.proj_x);
      const auto [y0, fy] = split_coordinate(c.proj_y);
      const std::array<std::uint64_t, 4> weights{(kAxisOne - fx) * (kAxisOne - fy),
                                                 fx * (kAxisOne - fy), (kAxisOne - fx) * fy,
                                                 fx * fy};
      assert(weights[0] + weights[1] + weights[2] + weights[3] == kUnitWeight);
      const Rgb8 src = camera_color.at(x, y);
      for (int k = 0; k < 4; ++k) {
        const std::uint64_t w = weights[static_cast<std::size_t>(k)];
        const long long px = x0 + (k & 1);
        const long long py = y0 + (k >> 1);
        if (w == 0 || px < 0 || py < 0 || px >= projector.width || py >= projector.height) {
          continue;
        }
        const auto i = static_cast<std::size_t>(py) * static_cast<std::size_t>(projector.width) +
                       static_cast<std::size_t>(px);
        acc.weight[i] += w;
        acc.color[i][0] += w * src.r;
        acc.color[i][1] += w * src.g;
        acc.color[i][2] += w * src.b;
      }
    }
  }
}

}  // namespace

std::size_t ProjectorImage::count(PixelState s) const {
  return static_cast<std::size_t>(std::count(state.pixels().begin(), state.pixels().end(), s));
}

ProjectorImage reconstruct(const sl::CorrespondenceMap& corr, const RgbImage& camera_color,
                           Size projector_size, unsigned tiles) {
  if (camera_color.size() != corr.camera_size()) {
    throw DimensionMismatch("camera image is " + format_size(camera_color.size()) +
                            " but correspondence map is " + format_size(corr.camera_size()));
  }
  if (projector_size.width <= 0 || projector_size.height <= 0) {
    throw InvalidArgument("projector size must be positive");
  }
  const int rows = corr.camera_size().height;
  tiles = std::clamp(tiles == 0 ? default_thread_count() : tiles, 1U,
                     static_cast<unsigned>(std::max(rows, 1)));
  const std::size_t n = static_cast<std::size_t>(projector_size.width) *
                        static_cast<std::size_t>(projector_size.height);

  std::vector<Accumulator> partial(tiles, Accumulator(n));
  parallel_for_rows(static_cast<int>(tiles), tiles, [&](int tile_begin, int tile_end) {
    for (int t = tile_begin; t < tile_end; ++t) {
      const int begin = static_cast<int>(static_cast<long long>(rows) * t / tiles);
      const int end = static_cast<int>(static_cast<long long>(rows) * (t + 1) / tiles);
      splat_rows(corr, camera_color, projector_size, begin, end,
                 partial[static_cast<std::size_t>(t)]);
    }
  });
  for (std::size_t t = 1; t < partial.size(); ++t) {
    partial[0].merge(partial[t]);
  }
  const Accumulator& acc = partial[0];

  ProjectorImage out(projector_size);
  auto color = out.color.pixels();
  auto coverage = out.coverage.pixels();
  auto state = out.state.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t w = acc.weight[i];
    if (w == 0) {
      continue;
    }
    const auto channel = [&](int c) {
      return static_cast<std::uint8_t>((acc.color[i][static_cast<std::size_t>(c)] + w / 2) / w);
    };
    color[i] = Rgb8{channel(0), channel(1), channel(2)};
    coverage[i] = static_cast<double>(w) / static_cast<double>(kUnitWeight);
    state[i] = PixelState::Covered;
  }
  return out;
}

ProjectorImage fill_holes(const ProjectorImage& image, int max_radius) {
  ProjectorImage current = image;
  const int width = image.size().width;
  const int height = image.size().height;
  for (int pass = 0; pass < max_radius; ++pass) {
    const ProjectorImage previous = current;
    bool changed = false;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (previous.state.at(x, y) != PixelState::Hole) {
          continue;
        }
        double weight = 0.0;
        std::array<double, 3> sum{0.0, 0.0, 0.0};
        int neighbours = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if ((dx == 0 && dy == 0) || !previous.state.contains(nx, ny) ||
                previous.state.at(nx, ny) == PixelState::Hole) {
              continue;
            }
            const double w = previous.coverage.at(nx, ny);
            const Rgb8 c = previous.color.at(nx, ny);
            weight += w;
            sum[0] += w * c.r;
            sum[1] += w * c.g;
            sum[2] += w * c.b;
            ++neighbours;
          }
        }
        if (neighbours == 0 || !(weight > 0.0)) {
          continue;
        }
        const auto channel = [&](int c) {
          return static_cast<std::uint8_t>(
              std::clamp(std::lround(sum[static_cast<std::size_t>(c)] / weight), 0L, 255L));
        };
        current.color.at(x, y) = Rgb8{channel(0), channel(1), channel(2)};
        current.coverage.at(x, y) = weight / neighbours;
        current.state.at(x, y) = PixelState::Filled;
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
  }
  for (std::size_t i = 0; i < current.state.pixels().size(); ++i) {
    if (current.state.pixels()[i] == PixelState::Hole) {
      current.color.pixels()[i] = Rgb8{};
      current.coverage.pixels()[i] = 0.0;
    }
  }
  return current;
}

Gray16Image coverage_image(const ProjectorImage& image) {
  Gray16Image out(image.size().width, image.size().height);
  auto src = image.coverage.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<std::uint16_t>(std::min(65535.0, std::round(src[i] * 4096.0)));
  }
  return out;
}

}  // namespace procam::projimage

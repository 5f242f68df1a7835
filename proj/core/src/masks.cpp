#include "procam/masks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <queue>
#include <tuple>

namespace procam::masks {
namespace {

// N, NE, E, SE, S, SW, W, NW with image y pointing down.
constexpr std::array<PixelCoord, 8> kNeighbours{{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

double squared_distance(Rgb8 a, double r, double g, double b) {
  const double dr = a.r - r;
  const double dg = a.g - g;
  const double db = a.b - b;
  return dr * dr + dg * dg + db * db;
}

void check_tolerance(double tolerance) {
  if (!(tolerance >= 0.0)) {
    throw InvalidArgument("tolerance must be non-negative");
  }
}

void check_inside(const RgbImage& image, PixelCoord p, const char* what) {
  if (!image.contains(p)) {
    throw InvalidArgument(std::string(what) + " (" + std::to_string(p.x) + ", " +
                          std::to_string(p.y) + ") outside the " + format_size(image.size()) +
                          " image");
  }
}

// Bresenham, both ends included.
void rasterize_line(PixelCoord a, PixelCoord b, Mask& mask) {
  int dx = std::abs(b.x - a.x);
  int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  PixelCoord p = a;
  while (true) {
    if (mask.contains(p)) {
      mask.at(p) = 1;
    }
    if (p == b) {
      break;
    }
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      p.x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      p.y += sy;
    }
  }
}

}  // namespace

Mask magic_wand(const RgbImage& image, PixelCoord seed, double tolerance,
                Connectivity connectivity) {
  check_inside(image, seed, "seed");
  check_tolerance(tolerance);
  const Rgb8 ref = image.at(seed);
  const double limit = tolerance * tolerance;
  Mask mask(image.size(), 0);
  const auto fillable = [&](int x, int y) {
    return mask.at(x, y) == 0 && squared_distance(image.at(x, y), ref.r, ref.g, ref.b) <= limit;
  };

  // Span fill: each popped seed grows into a horizontal run, then the rows
  // above and below are scanned for new runs (one pixel wider for 8-conn).
  const int reach = connectivity == Connectivity::Eight ? 1 : 0;
  std::vector<PixelCoord> stack{seed};
  while (!stack.empty()) {
    const PixelCoord p = stack.back();
    stack.pop_back();
    if (!fillable(p.x, p.y)) {
      continue;
    }
    int left = p.x;
    int right = p.x;
    while (left > 0 && fillable(left - 1, p.y)) {
      --left;
    }
    while (right + 1 < image.width() && fillable(right + 1, p.y)) {
      ++right;
    }
    for (int x = left; x <= right; ++x) {
      mask.at(x, p.y) = 1;
    }
    for (const int ny : {p.y - 1, p.y + 1}) {
      if (ny < 0 || ny >= image.height()) {
        continue;
      }
      const int from = std::max(0, left - reach);
      const int to = std::min(image.width() - 1, right + reach);
      bool in_run = false;
      for (int x = from; x <= to; ++x) {
        const bool ok = fillable(x, ny);
        if (ok && !in_run) {
          stack.push_back({x, ny});
        }
        in_run = ok;
      }
    }
  }
  return mask;
}

Mask quick_select(const RgbImage& image, std::span<const PixelCoord> scribble, double tolerance) {
  if (scribble.empty()) {
    throw InvalidArgument("quick select needs a non-empty scribble");
  }
  check_tolerance(tolerance);
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  for (const auto& p : scribble) {
    check_inside(image, p, "scribble pixel");
    r += image.at(p).r;
    g += image.at(p).g;
    b += image.at(p).b;
  }
  const auto n = static_cast<double>(scribble.size());
  r /= n;
  g /= n;
  b /= n;
  const double limit = tolerance * tolerance;

  Mask mask(image.size(), 0);
  std::deque<PixelCoord> frontier;
  for (const auto& p : scribble) {
    if (mask.at(p) == 0) {
      mask.at(p) = 1;
      frontier.push_back(p);
    }
  }
  while (!frontier.empty()) {
    const PixelCoord p = frontier.front();
    frontier.pop_front();
    for (const auto& d : kNeighbours) {
      const PixelCoord q{p.x + d.x, p.y + d.y};
      if (mask.contains(q) && mask.at(q) == 0 &&
          squared_distance(image.at(q), r, g, b) <= limit) {
        mask.at(q) = 1;
        frontier.push_back(q);
      }
    }
  }
  return mask;
}

Image<double> edge_strength(const RgbImage& image) {
  const int w = image.width();
  const int h = image.height();
  Image<double> lum(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      lum.at(x, y) = luma(image.at(x, y));
    }
  }
  const auto L = [&](int x, int y) {
    return lum.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  Image<double> g(w, h, 0.0);
  double peak = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (L(x + 1, y - 1) + 2.0 * L(x + 1, y) + L(x + 1, y + 1)) -
                        (L(x - 1, y - 1) + 2.0 * L(x - 1, y) + L(x - 1, y + 1));
      const double gy = (L(x - 1, y + 1) + 2.0 * L(x, y + 1) + L(x + 1, y + 1)) -
                        (L(x - 1, y - 1) + 2.0 * L(x, y - 1) + L(x + 1, y - 1));
      g.at(x, y) = std::sqrt(gx * gx + gy * gy);
      peak = std::max(peak, g.at(x, y));
    }
  }
  if (peak > 0.0) {
    for (auto& v : g.pixels()) {
      v /= peak;
    }
  }
  return g;
}

namespace {

LassoPath shortest_segment(const Image<double>& strength, PixelCoord from, PixelCoord to) {
  const int w = strength.width();
  const auto n = strength.pixel_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> done(n, 0);
  using Entry = std::pair<double, std::size_t>;  // ties pop lowest index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const auto start = strength.index(from.x, from.y);
  const auto goal = strength.index(to.x, to.y);
  dist[start] = 0.0;
  open.emplace(0.0, start);
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (done[i]) {
      continue;
    }
    done[i] = 1;
    if (i == goal) {
      break;
    }
    const PixelCoord p{static_cast<int>(i % static_cast<std::size_t>(w)),
                       static_cast<int>(i / static_cast<std::size_t>(w))};
    for (const auto& step : kNeighbours) {
      const PixelCoord q{p.x + step.x, p.y + step.y};
      if (!strength.contains(q)) {
        continue;
      }
      const auto j = strength.index(q.x, q.y);
      if (done[j]) {
        continue;
      }
      const double length = (step.x != 0 && step.y != 0) ? std::sqrt(2.0) : 1.0;
      const double candidate = d + (1.0 - strength.at(q)) * length;
      if (candidate < dist[j]) {
        dist[j] = candidate;
        parent[j] = static_cast<std::int64_t>(i);
        open.emplace(candidate, j);
      }
    }
  }
  LassoPath reversed;
  for (auto i = static_cast<std::int64_t>(goal); i != -1; i = parent[static_cast<std::size_t>(i)]) {
    reversed.push_back({static_cast<int>(i % w), static_cast<int>(i / w)});
  }
  return {reversed.rbegin(), reversed.rend()};
}

}  // namespace

LassoPath magnetic_lasso(const RgbImage& image, std::span<const PixelCoord> anchors) {
  if (anchors.size() < 2) {
    throw InvalidArgument("magnetic lasso needs at least 2 anchors");
  }
  for (const auto& a : anchors) {
    check_inside(image, a, "anchor");
  }
  const auto strength = edge_strength(image);
  LassoPath path{anchors.front()};
  for (std::size_t k = 1; k < anchors.size(); ++k) {
    if (anchors[k] == path.back()) {
      continue;
    }
    const auto segment = shortest_segment(strength, path.back(), anchors[k]);
    path.insert(path.end(), segment.begin() + 1, segment.end());
  }
  return path;
}

double path_cost(const Image<double>& strength, const LassoPath& path) {
  double cost = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int dx = std::abs(path[i].x - path[i - 1].x);
    const int dy = std::abs(path[i].y - path[i - 1].y);
    const double length = (dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0;
    cost = cost + (1.0 - strength.at(path[i])) * length;
  }
  return cost;
}

Mask path_to_mask(const LassoPath& path, Size size) {
  Mask mask(size, 0);
  if (path.size() < 3) {
    return mask;
  }
  long long twice_area = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& a = path[i];
    const auto& b = path[(i + 1) % path.size()];
    twice_area += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
  }
  if (twice_area == 0) {
    return mask;
  }

  // Interior: pixel centre (x, y) is inside when an odd number of edge
  // crossings of row y lie strictly right of x (half-open in y).
  std::vector<double> crossings;
  for (int y = 0; y < size.height; ++y) {
    crossings.clear();
    for (std::size_t i = 0; i < path.size(); ++i) {
      const auto& a = path[i];
      const auto& b = path[(i + 1) % path.size()];
      if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
        crossings.push_back(a.x + static_cast<double>(y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int begin = std::max(0, static_cast<int>(std::ceil(crossings[k])));
      const int end = std::min(size.width, static_cast<int>(std::ceil(crossings[k + 1])));
      for (int x = begin; x < end; ++x) {
        mask.at(x, y) = 1;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    rasterize_line(path[i], path[i + 1], mask);
  }
  rasterize_line(path.back(), path.front(), mask);
  return mask;
}

std::size_t area(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.pixels().begin(), mask.pixels().end(), [](auto v) { return v != 0; }));
}

GrayImage to_gray(const Mask& mask) {
  GrayImage out(mask.size());
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    out.pixels()[i] = mask.pixels()[i] != 0 ? 255 : 0;
  }
  return out;
}

Mask from_gray(const GrayImage& image) {
  Mask out(image.size());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    out.pixels()[i] = image.pixels()[i] >= 128 ? 1 : 0;
  }
  return out;
}

}  // namespace procam::masks

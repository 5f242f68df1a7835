#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "procam/effects.hpp"

namespace procam::fx {
namespace {

// Axis neighbours first so staircase corners are not skipped diagonally.
constexpr std::array<PixelCoord, 8> kWalkOrder{{
    {0, -1}, {1, 0}, {0, 1}, {-1, 0}, {1, -1}, {1, 1}, {-1, 1}, {-1, -1}}};

class Tracer {
 public:
  explicit Tracer(const BinaryImage& edges)
      : edges_(edges), visited_(edges.size(), 0), degree_(edges.size(), 0) {
    for (int y = 0; y < edges.height(); ++y) {
      for (int x = 0; x < edges.width(); ++x) {
        if (is_edge(x, y)) {
          int n = 0;
          for (const auto& d : kWalkOrder) {
            n += is_edge(x + d.x, y + d.y) ? 1 : 0;
          }
          degree_.at(x, y) = static_cast<std::uint8_t>(n);
        }
      }
    }
  }

  bool is_edge(int x, int y) const { return edges_.contains(x, y) && edges_.at(x, y) != 0; }
  bool open(PixelCoord p) const { return is_edge(p.x, p.y) && visited_.at(p) == 0; }
  int degree(PixelCoord p) const { return degree_.at(p); }
  bool junction(PixelCoord p) const { return degree_.at(p) > 2; }

  // Follows unvisited neighbours from `start`; stops after entering a junction.
  std::vector<PixelCoord> walk(PixelCoord start, bool include_start) {
    std::vector<PixelCoord> points;
    if (include_start) {
      points.push_back(start);
      visited_.at(start) = 1;
    }
    PixelCoord current = start;
    while (true) {
      if (current != start && junction(current)) {
        break;
      }
      bool advanced = false;
      for (const auto& d : kWalkOrder) {
        const PixelCoord next{current.x + d.x, current.y + d.y};
        if (open(next)) {
          visited_.at(next) = 1;
          points.push_back(next);
          current = next;
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        break;
      }
    }
    return points;
  }

 private:
  const BinaryImage& edges_;
  Image<std::uint8_t> visited_;
  Image<std::uint8_t> degree_;
};

double step_length(PixelCoord a, PixelCoord b) {
  return (a.x != b.x && a.y != b.y) ? std::sqrt(2.0) : 1.0;
}

bool adjacent(PixelCoord a, PixelCoord b) {
  return a != b && std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1;
}

EdgeChain make_chain(std::vector<PixelCoord> points) {
  EdgeChain chain;
  chain.points = std::move(points);
  for (std::size_t i = 1; i < chain.points.size(); ++i) {
    chain.arc_length += step_length(chain.points[i - 1], chain.points[i]);
  }
  if (chain.points.size() >= 4 && adjacent(chain.points.front(), chain.points.back())) {
    chain.closed = true;
    chain.arc_length += step_length(chain.points.back(), chain.points.front());
  }
  return chain;
}

}  // namespace

std::vector<EdgeChain> trace_chains(const BinaryImage& edges, int min_chain_length) {
  Tracer tracer(edges);
  std::vector<EdgeChain> chains;
  const auto keep = [&](std::vector<PixelCoord> points) {
    if (static_cast<int>(points.size()) >= min_chain_length && !points.empty()) {
      chains.push_back(make_chain(std::move(points)));
    }
  };

  for (int y = 0; y < edges.height(); ++y) {
    for (int x = 0; x < edges.width(); ++x) {
      const PixelCoord p{x, y};
      if (tracer.open(p) && tracer.degree(p) == 1) {
        keep(tracer.walk(p, true));
      }
    }
  }
  // Loops and segments hanging between junctions: walk both ways from the
  // first unvisited pixel found.
  for (int y = 0; y < edges.height(); ++y) {
    for (int x = 0; x < edges.width(); ++x) {
      const PixelCoord p{x, y};
      if (!tracer.open(p)) {
        continue;
      }
      auto forward = tracer.walk(p, true);
      if (!tracer.junction(p)) {
        auto backward = tracer.walk(p, false);
        std::reverse(backward.begin(), backward.end());
        backward.insert(backward.end(), forward.begin(), forward.end());
        forward = std::move(backward);
      }
      keep(std::move(forward));
    }
  }
  return chains;
}

}  // namespace procam::fx

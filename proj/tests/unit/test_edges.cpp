#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "oracles.hpp"
#include "procam/effects.hpp"

using namespace procam;

namespace {

BinaryImage diamond(Size size, PixelCoord c, int r) {
  BinaryImage img(size, 0);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      if (std::abs(x - c.x) + std::abs(y - c.y) == r) img.at(x, y) = 1;
    }
  }
  return img;
}

}  // namespace

TEST(Canny, MatchesPixelwiseOracleOnRandomImages) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto image = seed % 2 == 0 ? oracle::random_blocks({64, 64}, seed)
                                     : oracle::random_rgb({64, 64}, seed);
    const double sigma = 0.6 + 0.2 * static_cast<double>(seed % 5);
    const auto ours = fx::canny(image, sigma, 0.2, 0.5);
    ASSERT_EQ(ours, oracle::canny(image, sigma, 0.2, 0.5)) << "seed " << seed;
  }
}

TEST(Canny, VerticalStepGivesOneThinLine) {
  RgbImage image(32, 16, Rgb8{20, 20, 20});
  for (int y = 0; y < 16; ++y) {
    for (int x = 16; x < 32; ++x) image.at(x, y) = Rgb8{220, 220, 220};
  }
  const auto edges = fx::canny(image, 1.0, 0.2, 0.5);
  EXPECT_EQ(edges, oracle::canny(image, 1.0, 0.2, 0.5));
  for (int y = 0; y < 16; ++y) {
    int count = 0;
    for (int x = 0; x < 32; ++x) {
      if (edges.at(x, y) != 0) {
        ++count;
        EXPECT_TRUE(x == 15 || x == 16) << x;
      }
    }
    EXPECT_EQ(count, 1) << "row " << y;
  }
}

TEST(Canny, ConstantImageHasNoEdges) {
  const auto edges = fx::canny(RgbImage(20, 20, Rgb8{90, 10, 200}), 1.0, 0.2, 0.5);
  for (auto v : edges.pixels()) EXPECT_EQ(v, 0);
}

TEST(Canny, OutputIsBinaryAndThresholdsNest) {
  const auto image = oracle::random_rgb({40, 40}, 77);
  const auto strict = fx::canny(image, 1.0, 0.3, 0.6);
  const auto loose = fx::canny(image, 1.0, 0.1, 0.6);
  for (std::size_t i = 0; i < strict.pixel_count(); ++i) {
    ASSERT_LE(strict.pixels()[i], 1);
    ASSERT_LE(strict.pixels()[i], loose.pixels()[i]);
  }
}

TEST(Canny, RejectsBadParameters) {
  const RgbImage image(8, 8);
  EXPECT_THROW(fx::canny(image, 0.0, 0.2, 0.5), InvalidArgument);
  EXPECT_THROW(fx::canny(image, 1.0, 0.5, 0.5), InvalidArgument);
  EXPECT_THROW(fx::canny(image, 1.0, -0.1, 0.5), InvalidArgument);
  EXPECT_THROW(fx::canny(image, 1.0, 0.2, 1.1), InvalidArgument);
}

TEST(Chains, OpenLine) {
  BinaryImage edges(20, 5, 0);
  for (int x = 3; x < 13; ++x) edges.at(x, 2) = 1;
  const auto chains = fx::trace_chains(edges, 8);
  ASSERT_EQ(chains.size(), 1U);
  EXPECT_EQ(chains[0].points.size(), 10U);
  EXPECT_FALSE(chains[0].closed);
  EXPECT_DOUBLE_EQ(chains[0].arc_length, 9.0);
  EXPECT_EQ(chains[0].points.front(), (PixelCoord{3, 2}));
  EXPECT_TRUE(fx::trace_chains(edges, 11).empty());
}

TEST(Chains, DiamondIsClosedLoop) {
  const auto edges = diamond({16, 16}, {8, 8}, 5);
  const auto chains = fx::trace_chains(edges, 8);
  ASSERT_EQ(chains.size(), 1U);
  EXPECT_TRUE(chains[0].closed);
  EXPECT_EQ(chains[0].points.size(), 20U);
  EXPECT_NEAR(chains[0].arc_length, 20.0 * std::sqrt(2.0), 1e-12);
}

TEST(Chains, CoverEdgePixelsOnceAndStayConnected) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto edges = fx::canny(oracle::random_blocks({64, 48}, seed), 1.0, 0.2, 0.5);
    const auto chains = fx::trace_chains(edges, 1);
    std::set<PixelCoord> seen;
    for (const auto& chain : chains) {
      ASSERT_FALSE(chain.points.empty());
      double length = 0.0;
      for (std::size_t i = 0; i < chain.points.size(); ++i) {
        const auto& p = chain.points[i];
        ASSERT_EQ(edges.at(p), 1);
        ASSERT_TRUE(seen.insert(p).second) << "pixel in two chains";
        if (i > 0) {
          const auto& q = chain.points[i - 1];
          const int dx = std::abs(p.x - q.x);
          const int dy = std::abs(p.y - q.y);
          ASSERT_EQ(std::max(dx, dy), 1);
          length += (dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0;
        }
      }
      if (!chain.closed) {
        ASSERT_NEAR(chain.arc_length, length, 1e-9);
      }
      ASSERT_GE(chain.arc_length, length);
    }
    std::size_t edge_pixels = 0;
    for (auto v : edges.pixels()) edge_pixels += v;
    EXPECT_EQ(seen.size(), edge_pixels);
    for (const auto& chain : fx::trace_chains(edges, 8)) EXPECT_GE(chain.points.size(), 8U);
  }
}

#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "procam/geometry.hpp"
#include "procam/simulator.hpp"

using namespace procam;

namespace {

geom::StereoRig demo_rig() { return sim::demo_scene().rig; }

// Points inside both frusta, 0.5..2 m from the camera.
std::vector<Eigen::Vector3d> visible_points(const geom::StereoRig& rig, int count,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Vector3d> points;
  while (static_cast<int>(points.size()) < count) {
    const double z = 0.5 + 1.5 * u(rng);
    const double px = (u(rng) * rig.camera.width - 0.5 - rig.camera.cx) / rig.camera.fx * z;
    const double py = (u(rng) * rig.camera.height - 0.5 - rig.camera.cy) / rig.camera.fy * z;
    const Eigen::Vector3d p(px, py, z);
    const auto cam = rig.camera.project(p);
    const auto proj = rig.projector.project(rig.to_projector(p));
    if (cam && proj && rig.camera.contains(cam->x(), cam->y()) &&
        rig.projector.contains(proj->x(), proj->y())) {
      points.push_back(p);
    }
  }
  return points;
}

}  // namespace

TEST(Pinhole, RayAndProjectAreInverse) {
  const auto rig = demo_rig();
  const Eigen::Vector2d pixel(12.25, 200.75);
  const Eigen::Vector3d ray = rig.camera.ray(pixel.x(), pixel.y());
  EXPECT_DOUBLE_EQ(ray.z(), 1.0);
  const auto back = rig.camera.project(ray * 3.0);
  ASSERT_TRUE(back);
  EXPECT_NEAR(back->x(), pixel.x(), 1e-12);
  EXPECT_NEAR(back->y(), pixel.y(), 1e-12);
  EXPECT_FALSE(rig.camera.project({0.0, 0.0, -1.0}));
  EXPECT_FALSE(rig.camera.project({0.0, 0.0, 0.0}));
}

TEST(Pinhole, ContainsUsesHalfPixelBorders) {
  geom::PinholeModel m{100, 100, 1.5, 1.5, 4, 4};
  EXPECT_TRUE(m.contains(-0.5, -0.5));
  EXPECT_TRUE(m.contains(3.49, 3.49));
  EXPECT_FALSE(m.contains(3.5, 0.0));
  EXPECT_FALSE(m.contains(0.0, -0.51));
}

TEST(Rig, PoseHelpersAreConsistent) {
  const auto rig = demo_rig();
  const Eigen::Vector3d p(0.1, -0.2, 1.3);
  EXPECT_LT((rig.to_camera(rig.to_projector(p)) - p).norm(), 1e-12);
  EXPECT_LT(rig.to_projector(rig.projector_center()).norm(), 1e-12);
  const auto swapped = rig.swapped();
  EXPECT_LT((swapped.to_projector(rig.to_projector(p)) - p).norm(), 1e-12);
  EXPECT_EQ(swapped.camera.size(), rig.projector.size());
}

TEST(Triangulate, RoundTripThroughProjection) {
  const auto rig = demo_rig();
  double worst = 0.0;
  for (const auto& p : visible_points(rig, 2000, 1)) {
    const auto cam = *rig.camera.project(p);
    const auto proj = *rig.projector.project(rig.to_projector(p));
    const auto q = geom::triangulate(rig, cam, proj);
    worst = std::max(worst, (q - p).norm());
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Triangulate, MatchesLeastSquaresOracleWithPerturbedPixels) {
  const auto rig = demo_rig();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> jitter(-0.4, 0.4);
  for (const auto& p : visible_points(rig, 500, 2)) {
    const Eigen::Vector2d cam = *rig.camera.project(p);
    Eigen::Vector2d proj = *rig.projector.project(rig.to_projector(p));
    proj += Eigen::Vector2d(jitter(rng), jitter(rng));
    if (!rig.projector.contains(proj.x(), proj.y())) continue;
    const auto ours = geom::triangulate(rig, cam, proj);
    const auto ref = oracle::triangulate_lsq(rig, cam, proj);
    ASSERT_LT((ours - ref).norm(), 1e-9 * std::max(1.0, ref.norm()));
  }
}

TEST(Triangulate, ParallelRaysAreDegenerate) {
  geom::StereoRig rig;
  rig.camera = {100, 100, 50, 50, 101, 101};
  rig.projector = rig.camera;
  rig.translation = {-0.2, 0.0, 0.0};
  // Both principal rays point straight ahead from different centres.
  EXPECT_THROW(geom::triangulate(rig, {50, 50}, {50, 50}), DegenerateGeometry);
  EXPECT_NO_THROW(geom::triangulate(rig, {50, 50}, {30, 50}));
}

TEST(Triangulate, PixelsOutsideDevicesRejected) {
  const auto rig = demo_rig();
  EXPECT_THROW(geom::triangulate(rig, {-1.0, 5.0}, {10, 10}), InvalidArgument);
  EXPECT_THROW(geom::triangulate(rig, {5.0, 5.0}, {10, rig.projector.height + 1.0}),
               InvalidArgument);
}

TEST(Rig, JsonRoundTripAndValidation) {
  auto rig = demo_rig();
  const auto back = geom::parse_rig(geom::rig_to_json(rig));
  EXPECT_EQ(back.camera.size(), rig.camera.size());
  EXPECT_DOUBLE_EQ(back.projector.fx, rig.projector.fx);
  EXPECT_LT((back.rotation - rig.rotation).norm(), 1e-15);
  EXPECT_LT((back.translation - rig.translation).norm(), 1e-15);

  EXPECT_THROW(geom::parse_rig("{}"), FormatError);
  EXPECT_THROW(geom::parse_rig("[1,2"), FormatError);
  rig.rotation(0, 0) = 2.0;
  EXPECT_THROW(rig.validate(), InvalidArgument);
  rig = demo_rig();
  rig.camera.fx = 0.0;
  EXPECT_THROW(rig.validate(), InvalidArgument);
}

TEST(DepthMap, GroundTruthRecoversSurfaceDepth) {
  const auto scene = sim::demo_scene();
  const auto truth = sim::ground_truth(scene);
  const auto depth = geom::depth_map(scene.rig, truth);
  std::size_t checked = 0;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!truth.at(x, y).valid) {
        EXPECT_TRUE(std::isnan(depth.at(x, y)));
        continue;
      }
      const auto hit = sim::camera_hit(scene, x, y);
      ASSERT_TRUE(hit);
      // Correspondences are stored as float, which limits precision.
      ASSERT_NEAR(depth.at(x, y), hit->point.z(), 1e-3 * hit->point.z());
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000U);
}

TEST(DepthMap, SizeMismatchRejected) {
  const auto rig = demo_rig();
  sl::CorrespondenceMap corr({10, 10}, rig.projector.size());
  EXPECT_THROW(geom::depth_map(rig, corr), DimensionMismatch);
}

TEST(DisparityMap, ProjMinusCamera) {
  sl::CorrespondenceMap corr({3, 2}, {10, 10});
  corr.at(2, 1) = {7.5F, 4.0F, 1.0F, true};
  const auto dx = geom::disparity_map(corr, geom::Axis::X);
  const auto dy = geom::disparity_map(corr, geom::Axis::Y);
  EXPECT_EQ(dx.at(2, 1), 5.5F);
  EXPECT_EQ(dy.at(2, 1), 3.0F);
  EXPECT_TRUE(std::isnan(dx.at(0, 0)));
}

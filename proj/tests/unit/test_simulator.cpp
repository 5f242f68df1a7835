#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "procam/geometry.hpp"
#include "procam/image_io.hpp"
#include "procam/simulator.hpp"

namespace fs = std::filesystem;
using namespace procam;

namespace {

sim::SceneModel noiseless_demo() {
  auto scene = sim::demo_scene();
  scene.noise_sigma = 0.0;
  return scene;
}

// Flat grey plane facing the camera at z = 1, or facing away when flipped.
sim::SceneModel wall(bool flipped) {
  auto scene = noiseless_demo();
  scene.planes.clear();
  sim::Plane p;
  p.corner = {-2.0, -2.0, 1.0};
  p.edge_u = {4.0, 0.0, 0.0};
  p.edge_v = {0.0, 4.0, 0.0};
  if (flipped) std::swap(p.edge_u, p.edge_v);
  p.texture = RgbImage(4, 4, Rgb8{128, 128, 128});
  scene.planes.push_back(p);
  return scene;
}

}  // namespace

TEST(Simulator, CapturesAreDeterministicAndThreadIndependent) {
  const auto scene = sim::demo_scene();
  const auto patterns = sl::generate_patterns(256, 256);
  const std::vector<GrayImage> subset(patterns.frames.begin(), patterns.frames.begin() + 4);
  const auto a = sim::simulate_captures(scene, subset, 1);
  const auto b = sim::simulate_captures(scene, subset, 4);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, sim::simulate_captures(scene, subset, 0));
}

TEST(Simulator, NoiseDependsOnSeedAndFrame) {
  auto scene = sim::demo_scene();
  scene.noise_sigma = 0.02;
  const GrayImage grey(256, 256, 128);
  const auto f0 = sim::simulate_capture(scene, grey, 0);
  EXPECT_NE(f0, sim::simulate_capture(scene, grey, 1));
  scene.seed += 1;
  EXPECT_NE(f0, sim::simulate_capture(scene, grey, 0));
}

TEST(Simulator, BrighterPatternNeverDarkensPixels) {
  const auto scene = noiseless_demo();
  GrayImage previous = sim::simulate_capture(scene, GrayImage(256, 256, 0));
  for (int level = 32; level <= 255; level += 32) {
    const auto frame = sim::simulate_capture(scene, GrayImage(256, 256, static_cast<std::uint8_t>(level)));
    for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
      ASSERT_GE(frame.pixels()[i], previous.pixels()[i]) << "level " << level;
    }
    previous = frame;
  }
}

TEST(Simulator, GroundTruthTriangulatesOntoThePlane) {
  const auto scene = noiseless_demo();
  const auto truth = sim::ground_truth(scene);
  const auto& plane = scene.planes.front();
  const Eigen::Vector3d normal = plane.front_normal();
  double worst = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < truth.camera_size().height; ++y) {
    for (int x = 0; x < truth.camera_size().width; ++x) {
      const auto& c = truth.at(x, y);
      if (!c.valid) continue;
      const auto p = geom::triangulate(scene.rig, {x, y}, {c.proj_x, c.proj_y});
      worst = std::max(worst, std::abs(normal.dot(p - plane.corner)));
      ++n;
    }
  }
  EXPECT_GT(n, 30000U);
  EXPECT_LE(worst, 1e-4);
}

TEST(Simulator, NoiselessDecodeMatchesGroundTruth) {
  const auto scene = noiseless_demo();
  const auto patterns = sl::generate_patterns(256, 256);
  const auto corr = sl::decode(sim::simulate_captures(scene, patterns.frames), patterns.manifest);
  const auto truth = sim::ground_truth(scene);
  std::size_t total = 0;
  std::size_t exact = 0;
  for (int y = 0; y < truth.camera_size().height; ++y) {
    for (int x = 0; x < truth.camera_size().width; ++x) {
      const auto& t = truth.at(x, y);
      if (!t.valid) continue;
      ++total;
      const auto& c = corr.at(x, y);
      if (c.valid && c.proj_x == std::round(t.proj_x) && c.proj_y == std::round(t.proj_y)) ++exact;
    }
  }
  ASSERT_GT(total, 0U);
  EXPECT_GE(static_cast<double>(exact) / static_cast<double>(total), 0.999)
      << exact << " of " << total;
}

TEST(Simulator, BackFacesAreTransparent) {
  const auto front = wall(false);
  const auto back = wall(true);
  EXPECT_TRUE(sim::camera_hit(front, 160, 120));
  EXPECT_FALSE(sim::camera_hit(back, 160, 120));
  EXPECT_EQ(sim::ground_truth(back).valid_count(), 0U);
  const auto lit = sim::simulate_capture(back, GrayImage(256, 256, 255));
  for (auto v : lit.pixels()) EXPECT_EQ(v, 0);
}

TEST(Simulator, CameraHitIsNearestPlane) {
  auto scene = wall(false);
  auto nearer = scene.planes.front();
  nearer.corner.z() = 0.5;
  nearer.texture = RgbImage(4, 4, Rgb8{255, 0, 0});
  scene.planes.push_back(nearer);
  const auto hit = sim::camera_hit(scene, 160, 120);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->plane, 1);
  EXPECT_NEAR(hit->point.z(), 0.5, 1e-12);
  EXPECT_EQ(sim::render_camera_albedo(scene).at(160, 120), (Rgb8{255, 0, 0}));
}

TEST(Simulator, RendersAreConsistentWithTheirViewpoints) {
  const auto scene = noiseless_demo();
  const auto camera = sim::render_camera_albedo(scene);
  const auto projector = sim::render_projector_albedo(scene);
  EXPECT_EQ(camera.size(), scene.rig.camera.size());
  EXPECT_EQ(projector.size(), scene.rig.projector.size());
  // The demo plane fills the middle of both views.
  EXPECT_NE(camera.at(160, 120), Rgb8{});
  EXPECT_NE(projector.at(128, 128), Rgb8{});
}

TEST(Simulator, PatternSizeMustMatchProjector) {
  EXPECT_THROW(sim::simulate_capture(sim::demo_scene(), GrayImage(10, 10)), DimensionMismatch);
}

TEST(SceneJson, DemoRoundTripsThroughParser) {
  const auto scene = sim::parse_scene(sim::demo_scene_json());
  EXPECT_EQ(scene.planes.size(), 1U);
  EXPECT_EQ(scene.rig.camera.size(), (Size{320, 240}));
  EXPECT_EQ(scene.rig.projector.size(), (Size{256, 256}));
  EXPECT_EQ(scene.seed, 7U);
  EXPECT_NEAR(scene.noise_sigma, 1.0 / 255.0, 1e-15);
  EXPECT_EQ(scene.planes[0].texture.size(), (Size{512, 384}));
}

TEST(SceneJson, TexturesFromFilesAndProcedures) {
  const fs::path dir = fs::temp_directory_path() / "procam_test_scene";
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::write_png(dir / "tex.png", RgbImage(3, 2, Rgb8{1, 2, 3}));
  const std::string rig = geom::rig_to_json(sim::demo_scene().rig);
  const std::string text = R"({"rig": )" + rig + R"(, "planes": [
      {"points": [0,0,1, 1,0,0, 0,1,0], "texture": "tex.png"},
      {"points": [0,0,2, 1,0,0, 0,1,0], "texture": {"kind": "solid", "color": [9, 8, 7]}},
      {"points": [0,0,3, 1,0,0, 0,1,0],
       "texture": {"kind": "checker", "size": [4, 4], "cells": 2, "colors": [[0,0,0],[255,255,255]]}}
  ]})";
  std::ofstream(dir / "scene.json") << text;
  const auto scene = sim::read_scene(dir / "scene.json");
  ASSERT_EQ(scene.planes.size(), 3U);
  EXPECT_EQ(scene.planes[0].texture.at(2, 1), (Rgb8{1, 2, 3}));
  EXPECT_EQ(scene.planes[1].texture.at(0, 0), (Rgb8{9, 8, 7}));
  EXPECT_EQ(scene.planes[2].texture.at(0, 0), (Rgb8{0, 0, 0}));
  EXPECT_EQ(scene.planes[2].texture.at(2, 0), (Rgb8{255, 255, 255}));
}

TEST(SceneJson, RejectsMalformedScenes) {
  const std::string rig = geom::rig_to_json(sim::demo_scene().rig);
  const auto with = [&](const std::string& planes, const std::string& extra = "") {
    return R"({"rig": )" + rig + R"(, "planes": )" + planes + extra + "}";
  };
  const std::string good_plane = R"([{"points": [0,0,1, 1,0,0, 0,1,0], "texture": {"kind": "solid", "color": [1,1,1]}}])";
  EXPECT_NO_THROW(sim::parse_scene(with(good_plane)));
  EXPECT_THROW(sim::parse_scene(R"({"planes": []})"), FormatError);
  EXPECT_THROW(sim::parse_scene(with("[]")), InvalidArgument);
  EXPECT_THROW(sim::parse_scene(with(R"([{"points": [0,0,1], "texture": {"kind": "solid", "color": [1,1,1]}}])")),
               FormatError);
  EXPECT_THROW(sim::parse_scene(with(R"([{"points": [0,0,1, 1,0,0, 2,0,0], "texture": {"kind": "solid", "color": [1,1,1]}}])")),
               InvalidArgument);
  EXPECT_THROW(sim::parse_scene(with(R"([{"points": [0,0,1, 1,0,0, 0,1,0], "texture": {"kind": "noise"}}])")),
               FormatError);
  EXPECT_THROW(sim::parse_scene(with(good_plane, R"(, "gamma": 0)")), InvalidArgument);
  EXPECT_THROW(sim::parse_scene(with(good_plane, R"(, "ambient": 1.5)")), InvalidArgument);
  EXPECT_THROW(sim::parse_scene("nope"), FormatError);
}

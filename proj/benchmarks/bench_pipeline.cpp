#include <benchmark/benchmark.h>

#include <vector>

#include "procam/effects.hpp"
#include "procam/masks.hpp"
#include "procam/projimage.hpp"
#include "procam/shaderlang.hpp"
#include "procam/simulator.hpp"
#include "procam/slcodec.hpp"

using namespace procam;

namespace {

struct DemoData {
  sim::SceneModel scene = sim::demo_scene();
  sl::PatternSet patterns = sl::generate_patterns(256, 256);
  std::vector<GrayImage> captures = sim::simulate_captures(scene, patterns.frames);
  sl::CorrespondenceMap truth = sim::ground_truth(scene);
  RgbImage camera = sim::render_camera_albedo(scene);
  RgbImage projector = sim::render_projector_albedo(scene);
};

const DemoData& demo() {
  static const DemoData data;
  return data;
}

void BM_Decode(benchmark::State& state) {
  const auto& d = demo();
  sl::DecodeOptions options;
  options.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sl::decode(d.captures, d.patterns.manifest, options));
}
BENCHMARK(BM_Decode)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_SimulateCaptures(benchmark::State& state) {
  const auto& d = demo();
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_captures(d.scene, d.patterns.frames));
}
BENCHMARK(BM_SimulateCaptures)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const auto& d = demo();
  for (auto _ : state) {
    const auto image = projimage::reconstruct(d.truth, d.camera, d.scene.rig.projector.size());
    benchmark::DoNotOptimize(projimage::fill_holes(image));
  }
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

void BM_Canny(benchmark::State& state) {
  const auto& d = demo();
  for (auto _ : state) benchmark::DoNotOptimize(fx::canny(d.projector, 1.0, 0.2, 0.5));
}
BENCHMARK(BM_Canny)->Unit(benchmark::kMillisecond);

void BM_MagicWand(benchmark::State& state) {
  const auto& d = demo();
  for (auto _ : state) benchmark::DoNotOptimize(masks::magic_wand(d.projector, {128, 128}, 40.0));
}
BENCHMARK(BM_MagicWand)->Unit(benchmark::kMicrosecond);

void BM_MagneticLasso(benchmark::State& state) {
  const auto& d = demo();
  const std::vector<PixelCoord> anchors{{40, 40}, {200, 60}, {180, 210}, {50, 190}, {40, 40}};
  for (auto _ : state) benchmark::DoNotOptimize(masks::magnetic_lasso(d.projector, anchors));
}
BENCHMARK(BM_MagneticLasso)->Unit(benchmark::kMillisecond);

void BM_TronFrame(benchmark::State& state) {
  const fx::PreparedEffect effect(fx::EffectSpec{}, demo().projector);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(effect.render(t));
    t += 1.0 / 60.0;
  }
}
BENCHMARK(BM_TronFrame)->Unit(benchmark::kMillisecond);

void BM_ShaderFrame(benchmark::State& state) {
  const auto program = shader::compile_or_throw(
      "void mainImage(out vec4 c, in vec2 p) {\n"
      "  vec2 uv = (2.0 * p - iResolution.xy) / iResolution.y;\n"
      "  float v = 0.0;\n"
      "  for (int i = 0; i < 4; i++) {\n"
      "    v += sin(uv.x * float(i + 1) * 3.0 + iTime) * cos(uv.y * float(i + 2) * 2.0);\n"
      "  }\n"
      "  c = vec4(0.5 + 0.5 * cos(v + vec3(0.0, 2.0, 4.0)), 1.0);\n"
      "}\n");
  shader::Uniforms u;
  shader::RenderOptions options;
  options.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shader::render_frame(*program, u, {256, 256}, options));
    u.time += 1.0 / 60.0;
  }
}
BENCHMARK(BM_ShaderFrame)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive carries LTO bytecode from another GCC.
BENCHMARK_MAIN();

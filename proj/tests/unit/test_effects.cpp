#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "procam/effects.hpp"
#include "procam/shaderlang.hpp"

using namespace procam;

namespace {

// One open 8-connected chain: a horizontal run then a diagonal.
fx::EdgeChain single_chain() {
  BinaryImage edges(64, 32, 0);
  for (int x = 4; x < 40; ++x) edges.at(x, 8) = 1;
  for (int k = 1; k < 12; ++k) edges.at(39 + k, 8 + k) = 1;
  const auto chains = fx::trace_chains(edges, 8);
  EXPECT_EQ(chains.size(), 1U);
  return chains.front();
}

fx::EffectSpec spec_of(fx::EffectKind kind) {
  fx::EffectSpec spec;
  spec.kind = kind;
  if (kind == fx::EffectKind::Shader) {
    spec.shader_source =
        "void mainImage(out vec4 fragColor, in vec2 fragCoord) {\n"
        "  vec2 uv = fragCoord / iResolution.xy;\n"
        "  vec3 scene = texture(iChannel0, uv).rgb;\n"
        "  fragColor = vec4(scene.bgr * (0.5 + 0.5 * sin(iTime)), 1.0);\n"
        "}\n";
  }
  return spec;
}

masks::Mask left_half(Size size) {
  masks::Mask mask(size, 0);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width / 2; ++x) mask.at(x, y) = 1;
  }
  return mask;
}

}  // namespace

TEST(Tron, PeriodicInChainTravelTime) {
  const auto chain = single_chain();
  const std::vector<fx::EdgeChain> chains{chain};
  fx::TronParams params;
  params.speed = 37.0;
  const double period = chain.arc_length / params.speed;
  for (double t : {0.0, 0.13, 0.5, 1.7, 3.25}) {
    const auto a = fx::render_tron(chains, {64, 32}, t, params, 5);
    const auto b = fx::render_tron(chains, {64, 32}, t + period, params, 5);
    EXPECT_EQ(a, b) << t;
    EXPECT_NEAR(fx::tron_pulse_center(chain, 0, t, params, 5),
                fx::tron_pulse_center(chain, 0, t + period, params, 5), 1e-6);
  }
  // Half a period later the pulse is elsewhere.
  EXPECT_NE(fx::render_tron(chains, {64, 32}, 0.0, params, 5),
            fx::render_tron(chains, {64, 32}, period / 2, params, 5));
}

TEST(Tron, PulseMovesAtConfiguredSpeed) {
  const auto chain = single_chain();
  fx::TronParams params;
  params.speed = 10.0;
  const double c0 = fx::tron_pulse_center(chain, 0, 0.0, params, 1);
  const double c1 = fx::tron_pulse_center(chain, 0, 0.5, params, 1);
  EXPECT_NEAR(std::fmod(c1 - c0 + chain.arc_length, chain.arc_length), 5.0, 1e-4);
}

TEST(Tron, OnlyChainPixelsLitAndGlowBounded) {
  const auto chain = single_chain();
  fx::TronParams params;
  const auto frame = fx::render_tron({chain}, {64, 32}, 0.4, params, 0);
  std::size_t lit = 0;
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 64; ++x) {
      const Rgb8 c = frame.at(x, y);
      if (c != Rgb8{}) ++lit;
    }
  }
  EXPECT_EQ(lit, chain.points.size());
  const auto floor_value = static_cast<int>(std::lround(255 * params.base_glow));
  for (const auto& p : chain.points) {
    EXPECT_EQ(frame.at(p).r, 0);
    EXPECT_GE(frame.at(p).g, floor_value);
  }
}

TEST(Tron, OutsideMaskIsBlack) {
  const auto chain = single_chain();
  const auto mask = left_half({64, 32});
  const auto frame = fx::render_tron({chain}, {64, 32}, 0.1, fx::TronParams{}, 0, &mask);
  for (int y = 0; y < 32; ++y) {
    for (int x = 32; x < 64; ++x) EXPECT_EQ(frame.at(x, y), Rgb8{});
  }
}

TEST(Distort, ZeroAmplitudeIsIdentity) {
  const auto scene = oracle::random_rgb({40, 30}, 1);
  fx::DistortParams params;
  params.amplitude = 0.0;
  for (double t : {0.0, 0.7, 12.0}) EXPECT_EQ(fx::render_distort(scene, t, params), scene);
}

TEST(Distort, PeriodicInTemporalFrequency) {
  const auto scene = oracle::random_rgb({40, 30}, 2);
  fx::DistortParams params;
  params.temporal_freq = 0.25;
  EXPECT_EQ(fx::render_distort(scene, 0.3, params), fx::render_distort(scene, 4.3, params));
  EXPECT_NE(fx::render_distort(scene, 0.3, params), scene);
}

TEST(Distort, PassesSourceThroughOutsideMask) {
  const auto scene = oracle::random_rgb({40, 30}, 3);
  const auto mask = left_half(scene.size());
  const auto out = fx::render_distort(scene, 0.5, fx::DistortParams{}, &mask);
  for (int y = 0; y < 30; ++y) {
    for (int x = 20; x < 40; ++x) EXPECT_EQ(out.at(x, y), scene.at(x, y));
  }
}

TEST(Cartoon, QuantizesToBinCentres) {
  EXPECT_EQ(fx::quantize_channel(0, 2), 64);
  EXPECT_EQ(fx::quantize_channel(127, 2), 64);
  EXPECT_EQ(fx::quantize_channel(128, 2), 192);
  EXPECT_EQ(fx::quantize_channel(255, 2), 192);
  EXPECT_EQ(fx::quantize_channel(255, 256), 255);
  EXPECT_EQ(fx::quantize_channel(0, 256), 0);
}

TEST(Cartoon, FlatImageStaysFlatAndQuantized) {
  const RgbImage flat(16, 16, Rgb8{100, 200, 30});
  fx::CartoonParams params;
  params.levels = 4;
  const auto out = fx::render_cartoon(flat, params);
  const Rgb8 expected{fx::quantize_channel(100, 4), fx::quantize_channel(200, 4),
                      fx::quantize_channel(30, 4)};
  for (auto c : out.pixels()) EXPECT_EQ(c, expected);
}

TEST(Cartoon, BilateralKeepsFlatRegions) {
  const RgbImage flat(8, 8, Rgb8{10, 20, 30});
  EXPECT_EQ(fx::bilateral_filter(flat, 3.0, 30.0), flat);
}

TEST(Effects, RenderingIsDeterministicForEveryKind) {
  const auto scene = oracle::random_blocks({48, 36}, 4);
  const auto mask = left_half(scene.size());
  for (auto kind : {fx::EffectKind::Tron, fx::EffectKind::Distort, fx::EffectKind::Cartoon,
                    fx::EffectKind::Shader}) {
    auto spec = spec_of(kind);
    spec.seed = 17;
    const fx::PreparedEffect a(spec, scene);
    const fx::PreparedEffect b(spec, scene);
    for (double t : {0.0, 0.5, 2.25}) {
      EXPECT_EQ(a.render(t), b.render(t)) << fx::to_string(kind);
      EXPECT_EQ(a.render(t), a.render(t)) << fx::to_string(kind);
      EXPECT_EQ(a.render(t), fx::render_effect(spec, scene, t)) << fx::to_string(kind);
    }
    spec.mask = "m1";
    const fx::PreparedEffect masked(spec, scene, mask);
    EXPECT_EQ(masked.render(1.0), masked.render(1.0));
  }
}

TEST(Effects, ShaderEffectKeepsSceneOutsideMask) {
  const auto scene = oracle::random_rgb({24, 16}, 5);
  auto spec = spec_of(fx::EffectKind::Shader);
  spec.mask = "m1";
  const auto mask = left_half(scene.size());
  const auto out = fx::PreparedEffect(spec, scene, mask).render(0.75);
  for (int y = 0; y < 16; ++y) {
    for (int x = 12; x < 24; ++x) EXPECT_EQ(out.at(x, y), scene.at(x, y));
  }
}

TEST(Effects, ShaderEffectSeesFrameUniforms) {
  auto spec = spec_of(fx::EffectKind::Shader);
  spec.shader.fps = 10.0;
  spec.shader_source =
      "void mainImage(out vec4 c, in vec2 p) {\n"
      "  c = vec4(float(iFrame) / 255.0, iTimeDelta, 0.0, 1.0);\n"
      "}\n";
  const auto out = fx::PreparedEffect(spec, RgbImage(2, 2)).render(1.26);
  EXPECT_EQ(out.at(0, 0).r, 12);
  EXPECT_EQ(out.at(0, 0).g, 26);  // round(0.1 * 255)
}

TEST(Effects, PreparedEffectRejectsBadInput) {
  const auto scene = oracle::random_rgb({10, 10}, 6);
  auto spec = spec_of(fx::EffectKind::Distort);
  spec.mask = "m1";
  EXPECT_THROW(fx::PreparedEffect(spec, scene), InvalidArgument);
  EXPECT_THROW(fx::PreparedEffect(spec, scene, masks::Mask(5, 5)), DimensionMismatch);
  spec.mask.reset();
  EXPECT_THROW(fx::PreparedEffect(spec, scene).render(-1.0), InvalidArgument);

  auto bad = spec_of(fx::EffectKind::Shader);
  bad.shader_source = "void mainImage(out vec4 c, in vec2 p) { c = 1; }";
  try {
    fx::PreparedEffect(bad, scene);
    FAIL() << "expected CompileError";
  } catch (const shader::CompileError& e) {
    ASSERT_FALSE(e.diagnostics().empty());
    EXPECT_EQ(e.diagnostics()[0].line, 1);
  }
}

TEST(EffectSpec, ParsesDefaultsAndParams) {
  const auto spec = fx::parse_effect_spec(
      R"({"kind": "tron", "mask": "m2", "seed": 9,
          "params": {"speed": 50, "color": [255, 0, 128], "min_chain_length": 3}})");
  EXPECT_EQ(spec.kind, fx::EffectKind::Tron);
  EXPECT_EQ(spec.mask, "m2");
  EXPECT_EQ(spec.seed, 9U);
  EXPECT_EQ(spec.tron.speed, 50.0);
  EXPECT_EQ(spec.tron.color, (Rgb8{255, 0, 128}));
  EXPECT_EQ(spec.tron.min_chain_length, 3);
  EXPECT_EQ(spec.tron.pulse_sigma, fx::TronParams{}.pulse_sigma);

  const auto shader = fx::parse_effect_spec(
      R"({"kind": "shader", "shader_source": "x", "params": {"wrap": "clamp", "fps": 30}})");
  EXPECT_EQ(shader.shader.wrap, fx::Wrap::Clamp);
  EXPECT_EQ(shader.shader.fps, 30.0);
  EXPECT_FALSE(shader.mask);
}

TEST(EffectSpec, JsonRoundTrip) {
  for (auto kind : {fx::EffectKind::Tron, fx::EffectKind::Distort, fx::EffectKind::Cartoon,
                    fx::EffectKind::Shader}) {
    auto spec = spec_of(kind);
    spec.seed = 123;
    spec.mask = "m7";
    spec.tron.speed = 12.5;
    spec.distort.amplitude = 2.0;
    spec.cartoon.levels = 9;
    const auto back = fx::parse_effect_spec(fx::to_json(spec));
    EXPECT_EQ(fx::to_json(back), fx::to_json(spec));
  }
}

TEST(EffectSpec, RejectsUnknownNamesAndBadRanges) {
  EXPECT_THROW(fx::parse_effect_spec(R"({"kind": "sparkle"})"), FormatError);
  EXPECT_THROW(fx::parse_effect_spec(R"({"kind": "tron", "params": {"sped": 1}})"), FormatError);
  EXPECT_THROW(fx::parse_effect_spec("[]"), FormatError);
  EXPECT_THROW(fx::parse_effect_spec("{"), FormatError);
  EXPECT_THROW(fx::parse_effect_spec(R"({"params": {}})"), FormatError);

  fx::EffectSpec spec;
  spec.tron.canny_low = 0.6;
  EXPECT_THROW(fx::validate(spec), InvalidArgument);
  spec = spec_of(fx::EffectKind::Distort);
  spec.distort.amplitude = -1.0;
  EXPECT_THROW(fx::validate(spec), InvalidArgument);
  spec = spec_of(fx::EffectKind::Cartoon);
  spec.cartoon.levels = 1;
  EXPECT_THROW(fx::validate(spec), InvalidArgument);
  spec = spec_of(fx::EffectKind::Shader);
  spec.shader_source.clear();
  EXPECT_THROW(fx::validate(spec), InvalidArgument);
  EXPECT_NO_THROW(fx::validate(spec_of(fx::EffectKind::Tron)));
}

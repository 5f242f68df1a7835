#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <string>

#include "oracles.hpp"
#include "procam/shaderlang.hpp"

using namespace procam;

namespace {

RgbImage run(const std::string& source, Size size = {1, 1}, shader::Uniforms uniforms = {},
             shader::RenderOptions options = {}) {
  const auto program = shader::compile_or_throw(source);
  return shader::render_frame(*program, uniforms, size, options);
}

// Renders a 1x1 shader whose body sets `vec4 o`; returns the pixel.
Rgb8 pixel(const std::string& body) {
  return run("void mainImage(out vec4 fragColor, in vec2 fragCoord) {\n  vec4 o = vec4(0.0, 0.0, "
             "0.0, 1.0);\n" +
             body + "\n  fragColor = o;\n}\n")
      .at(0, 0);
}

std::uint8_t q(float v) {
  if (std::isnan(v)) return 0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0F, 1.0F) * 255.0F));
}

}  // namespace

TEST(ShaderEval, ConstantColour) {
  const auto img = run(
      "void mainImage(out vec4 fragColor, in vec2 fragCoord) {\n"
      "  fragColor = vec4(0.2, 0.4, 0.6, 1.0);\n"
      "}\n",
      {7, 5});
  for (auto c : img.pixels()) EXPECT_EQ(c, (Rgb8{51, 102, 153}));
}

TEST(ShaderEval, GradientUsesPixelCentresFromBottomRow) {
  const Size size{16, 8};
  const auto img = run(
      "void mainImage(out vec4 fragColor, in vec2 fragCoord) {\n"
      "  vec2 uv = fragCoord / iResolution.xy;\n"
      "  fragColor = vec4(uv.x, uv.y, iResolution.z, 1.0);\n"
      "}\n",
      size);
  for (int row = 0; row < size.height; ++row) {
    for (int x = 0; x < size.width; ++x) {
      const float u = (static_cast<float>(x) + 0.5F) / 16.0F;
      const float v = (static_cast<float>(size.height - 1 - row) + 0.5F) / 8.0F;
      ASSERT_EQ(img.at(x, row), (Rgb8{q(u), q(v), 255})) << x << "," << row;
    }
  }
}

TEST(ShaderEval, SwizzlesReadAndWrite) {
  EXPECT_EQ(pixel("  vec3 c = vec3(0.1, 0.5, 0.9);\n  o.rgb = c.bgr;"),
            (Rgb8{q(0.9F), q(0.5F), q(0.1F)}));
  EXPECT_EQ(pixel("  vec4 c = vec4(0.0);\n  c.zx = vec2(1.0, 0.5);\n  o.rgb = c.xyz;"),
            (Rgb8{q(0.5F), 0, 255}));
  EXPECT_EQ(pixel("  o.gb = vec2(0.25).yx;\n  o.r = o.g + o.b;"), (Rgb8{q(0.5F), q(0.25F), q(0.25F)}));
}

TEST(ShaderEval, OutputIsClampedAndNaNBecomesZero) {
  EXPECT_EQ(pixel("  o.r = 2.0; o.g = -1.0; o.b = sqrt(-1.0);"), (Rgb8{255, 0, 0}));
}

TEST(ShaderEval, IntegerSemantics) {
  // Division truncates towards zero; division by zero yields 0.
  EXPECT_EQ(pixel("  int a = -7 / 2; int b = 7 / 2; int z = 0;\n"
                  "  o.r = float(a + 10) / 255.0; o.g = float(b) / 255.0;\n"
                  "  o.b = float(5 / z) / 255.0;"),
            (Rgb8{7, 3, 0}));
  EXPECT_EQ(pixel("  o.r = float(int(2.7)) / 255.0; o.g = float(int(-2.7) + 5) / 255.0;"),
            (Rgb8{2, 3, 0}));
  // Overflow wraps.
  EXPECT_EQ(pixel("  int big = 2147483647; big += 1;\n"
                  "  o.r = big < 0 ? 1.0 : 0.0;"),
            (Rgb8{255, 0, 0}));
}

TEST(ShaderEval, LoopsAccumulate) {
  EXPECT_EQ(pixel("  int s = 0;\n  for (int i = 0; i < 10; i++) { s += i; }\n"
                  "  o.r = float(s) / 255.0;"),
            (Rgb8{45, 0, 0}));
  EXPECT_EQ(pixel("  int n = 0;\n  for (int i = 10; i > 0; i -= 3) { n++; }\n"
                  "  o.r = float(n) / 255.0;"),
            (Rgb8{4, 0, 0}));
  EXPECT_EQ(pixel("  int n = 0;\n  for (float f = 0.0; f < 1.0; f += 0.125) { ++n; }\n"
                  "  o.r = float(n) / 255.0;"),
            (Rgb8{8, 0, 0}));
}

TEST(ShaderEval, EarlyReturnFromLoop) {
  EXPECT_EQ(run("int first(int k) { for (int i = 0; i < 100; ++i) { if (i * i >= k) return i; }"
                " return -1; }\n"
                "void mainImage(out vec4 c, in vec2 p) { c = vec4(float(first(50)) / 255.0); }\n")
                .at(0, 0),
            (Rgb8{8, 8, 8}));
}

TEST(ShaderEval, OutAndInoutParameters) {
  EXPECT_EQ(run("void f(in float a, out float b, inout float c) { a = 9.0; b = 0.5; c *= 2.0; }\n"
                "void mainImage(out vec4 o, in vec2 p) {\n"
                "  float a = 0.25; float b = 1.0; float c = 0.125;\n"
                "  f(a, b, c);\n"
                "  o = vec4(a, b, c, 1.0);\n"
                "}\n")
                .at(0, 0),
            (Rgb8{q(0.25F), q(0.5F), q(0.25F)}));
  // Out arguments may target swizzles.
  EXPECT_EQ(run("void g(out vec2 v) { v = vec2(1.0, 0.0); }\n"
                "void mainImage(out vec4 o, in vec2 p) { o = vec4(0.0); g(o.gr); }\n")
                .at(0, 0),
            (Rgb8{0, 255, 0}));
}

TEST(ShaderEval, MatricesAreColumnMajor) {
  EXPECT_EQ(pixel("  mat2 m = mat2(0.1, 0.2, 0.3, 0.4);\n  o.rg = m[1];\n"
                  "  o.b = (m * vec2(1.0, 0.0)).y;"),
            (Rgb8{q(0.3F), q(0.4F), q(0.2F)}));
  EXPECT_EQ(pixel("  mat3 m = mat3(0.5);\n  o.rgb = m * vec3(1.0, 0.5, 0.25);"),
            (Rgb8{q(0.5F), q(0.25F), q(0.125F)}));
}

TEST(ShaderEval, OutOfRangeRuntimeIndexReadsZero) {
  EXPECT_EQ(pixel("  vec3 v = vec3(1.0);\n  int i = 5;\n  o.r = v[i];\n  o.g = v[i - 4];"),
            (Rgb8{0, 255, 0}));
}

TEST(ShaderEval, BuiltinFunctions) {
  EXPECT_EQ(pixel("  o.r = mod(-0.25, 1.0); o.g = fract(1.75); o.b = mix(0.0, 1.0, 0.5);"),
            (Rgb8{q(0.75F), q(0.75F), q(0.5F)}));
  EXPECT_EQ(pixel("  o.r = smoothstep(0.0, 1.0, 0.5); o.g = length(vec2(0.3, 0.4));\n"
                  "  o.b = dot(vec3(0.1), vec3(1.0));"),
            (Rgb8{q(0.5F), q(0.5F), q(0.1F + 0.1F + 0.1F)}));
  EXPECT_EQ(pixel("  o.rgb = reflect(vec3(1.0, -1.0, 0.0), vec3(0.0, 1.0, 0.0)) * 0.5;"),
            (Rgb8{q(0.5F), q(0.5F), 0}));
  EXPECT_EQ(pixel("  o.r = step(0.5, 0.4); o.g = step(0.5, 0.5); o.b = clamp(3.0, 0.0, 0.2);"),
            (Rgb8{0, 255, q(0.2F)}));
}

TEST(ShaderEval, UniformsVisible) {
  shader::Uniforms u;
  u.time = 0.5;
  u.time_delta = 0.25;
  u.frame = 3;
  u.mouse = {0.1F, 0.2F, 0.3F, 0.4F};
  EXPECT_EQ(run("void mainImage(out vec4 o, in vec2 p) {\n"
                "  o = vec4(iTime, iTimeDelta, float(iFrame) / 255.0, 1.0);\n"
                "}\n",
                {1, 1}, u)
                .at(0, 0),
            (Rgb8{q(0.5F), q(0.25F), 3}));
  EXPECT_EQ(run("void mainImage(out vec4 o, in vec2 p) { o = iMouse; }\n", {1, 1}, u).at(0, 0),
            (Rgb8{q(0.1F), q(0.2F), q(0.3F)}));
}

TEST(ShaderEval, TextureSamplesTexelCentresExactly) {
  const auto tex = std::make_shared<const RgbImage>(oracle::random_rgb({4, 4}, 3));
  shader::Uniforms u;
  u.channels[0] = shader::Channel{tex, shader::ChannelWrap::Clamp};
  const auto img = run(
      "void mainImage(out vec4 o, in vec2 p) {\n"
      "  o = texture(iChannel0, p / iResolution.xy);\n"
      "}\n",
      {4, 4}, u);
  EXPECT_EQ(img, *tex);
}

TEST(ShaderEval, UnboundChannelRejected) {
  const auto program = shader::compile_or_throw(
      "void mainImage(out vec4 o, in vec2 p) { o = texture(iChannel1, vec2(0.5)); }\n");
  EXPECT_THROW(shader::render_frame(*program, {}, {2, 2}), InvalidArgument);
}

TEST(ShaderEval, IterationLimitRaisesRuntimeError) {
  const auto program = shader::compile_or_throw(
      "void mainImage(out vec4 o, in vec2 p) {\n"
      "  float s = 0.0;\n"
      "  for (int i = 0; i < 1000000; ++i) { s += 1.0; }\n"
      "  o = vec4(s);\n"
      "}\n");
  shader::RenderOptions options;
  options.iteration_limit = 1000;
  try {
    shader::render_frame(*program, {}, {2, 2}, options);
    FAIL() << "expected RuntimeError";
  } catch (const shader::RuntimeError& e) {
    EXPECT_EQ(e.diagnostic().line, 3);
  }
}

TEST(ShaderEval, ThreadCountDoesNotChangeOutput) {
  const auto program = shader::compile_or_throw(
      "void mainImage(out vec4 o, in vec2 p) {\n"
      "  vec2 uv = p / iResolution.xy;\n"
      "  o = vec4(sin(uv.x * 20.0 + iTime), cos(uv.y * 13.0), fract(uv.x * uv.y * 7.0), 1.0);\n"
      "}\n");
  shader::Uniforms u;
  u.time = 1.25;
  shader::RenderOptions one;
  one.threads = 1;
  shader::RenderOptions many;
  many.threads = 5;
  EXPECT_EQ(shader::render_frame(*program, u, {33, 21}, one),
            shader::render_frame(*program, u, {33, 21}, many));
}

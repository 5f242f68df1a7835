#include "shader_refs.hpp"

#include <algorithm>
#include <cmath>

namespace procam::golden {
namespace {

struct V2 {
  float x, y;
};
struct V3 {
  float x, y, z;
};

V2 operator-(V2 a, V2 b) { return {a.x - b.x, a.y - b.y}; }
V2 operator*(V2 a, float s) { return {a.x * s, a.y * s}; }
V2 operator*(float s, V2 a) { return {s * a.x, s * a.y}; }
V2 operator/(V2 a, float s) { return {a.x / s, a.y / s}; }
V2 operator+(V2 a, float s) { return {a.x + s, a.y + s}; }
V2 operator-(V2 a, float s) { return {a.x - s, a.y - s}; }
V3 operator+(V3 a, V3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
V3 operator-(V3 a, V3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
V3 operator*(V3 a, V3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
V3 operator*(V3 a, float s) { return {a.x * s, a.y * s, a.z * s}; }
V3 operator*(float s, V3 a) { return {s * a.x, s * a.y, s * a.z}; }
V3 operator+(float s, V3 a) { return {s + a.x, s + a.y, s + a.z}; }
V3 operator-(V3 a, float s) { return {a.x - s, a.y - s, a.z - s}; }

float dot(V2 a, V2 b) { return a.x * b.x + a.y * b.y; }
float dot(V3 a, V3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
float length(V2 a) { return std::sqrt(dot(a, a)); }
V3 normalize(V3 a) {
  const float l = std::sqrt(dot(a, a));
  return {a.x / l, a.y / l, a.z / l};
}
float fract(float x) { return x - std::floor(x); }
float clampf(float x, float lo, float hi) { return std::fmin(std::fmax(x, lo), hi); }
float mixf(float a, float b, float t) { return a * (1.0F - t) + b * t; }
V3 mix(V3 a, V3 b, float t) { return {mixf(a.x, b.x, t), mixf(a.y, b.y, t), mixf(a.z, b.z, t)}; }
float smoothstep(float e0, float e1, float x) {
  const float s = clampf((x - e0) / (e1 - e0), 0.0F, 1.0F);
  return s * s * (3.0F - 2.0F * s);
}

V2 uv_of(float fx, float fy, Size s) {
  return {fx / static_cast<float>(s.width), fy / static_cast<float>(s.height)};
}

V2 centred(float fx, float fy, Size s) {
  const V2 res{static_cast<float>(s.width), static_cast<float>(s.height)};
  return (2.0F * V2{fx, fy} - res) / res.y;
}

Vec4f rgb(V3 c) { return {c.x, c.y, c.z, 1.0F}; }

// GL-style bilinear lookup with repeat wrapping; v = 0 is the bottom row.
V3 texture_repeat(const RgbImage& image, V2 uv) {
  const int w = image.width();
  const int h = image.height();
  const float x = uv.x * static_cast<float>(w) - 0.5F;
  const float y = (1.0F - uv.y) * static_cast<float>(h) - 0.5F;
  const float fx = std::floor(x);
  const float fy = std::floor(y);
  const float ax = x - fx;
  const float ay = y - fy;
  const auto wrap = [](long long i, int n) {
    const long long m = i % n;
    return static_cast<int>(m < 0 ? m + n : m);
  };
  const int x0 = wrap(static_cast<long long>(fx), w);
  const int x1 = wrap(static_cast<long long>(fx) + 1, w);
  const int y0 = wrap(static_cast<long long>(fy), h);
  const int y1 = wrap(static_cast<long long>(fy) + 1, h);
  const auto channel = [&](auto get) {
    const float top = (get(image.at(x0, y0)) / 255.0F) * (1.0F - ax) +
                      (get(image.at(x1, y0)) / 255.0F) * ax;
    const float bottom = (get(image.at(x0, y1)) / 255.0F) * (1.0F - ax) +
                         (get(image.at(x1, y1)) / 255.0F) * ax;
    return top * (1.0F - ay) + bottom * ay;
  };
  return {channel([](Rgb8 c) { return static_cast<float>(c.r); }),
          channel([](Rgb8 c) { return static_cast<float>(c.g); }),
          channel([](Rgb8 c) { return static_cast<float>(c.b); })};
}

Vec4f solid(float, float, Size, float, const RgbImage*) { return {0.2F, 0.4F, 0.6F, 1.0F}; }

Vec4f gradient(float fx, float fy, Size s, float t, const RgbImage*) {
  const V2 uv = uv_of(fx, fy, s);
  return {uv.x, uv.y, 0.5F + 0.5F * std::sin(t), 1.0F};
}

Vec4f swizzle(float fx, float fy, Size s, float, const RgbImage*) {
  const V2 uv = uv_of(fx, fy, s);
  // v.zxy = (0.25, u, v); c.xz = c.zx * (0.5, 2) -> (v * 0.5, u, 0.5); out = c.bgr.
  const V3 c{uv.y * 0.5F, uv.x, 0.25F * 2.0F};
  return {c.z, c.y, c.x, 1.0F};
}

Vec4f rings(float fx, float fy, Size s, float t, const RgbImage*) {
  const V2 p = centred(fx, fy, s);
  const float d = length(p);
  const float v = 0.5F + 0.5F * std::cos(20.0F * d - 4.0F * t);
  return rgb(mix(V3{0.1F, 0.2F, 0.5F}, V3{1.0F, 0.8F, 0.3F}, smoothstep(0.2F, 0.8F, v)));
}

Vec4f plasma(float fx, float fy, Size s, float t, const RgbImage*) {
  const V2 p = V2{fx, fy} / static_cast<float>(s.height);
  float v = 0.0F;
  for (int i = 0; i < 5; ++i) {
    const auto fi = static_cast<float>(i);
    v += std::sin(p.x * (fi + 1.0F) * 3.0F + t * (0.5F + fi * 0.3F)) *
         std::cos(p.y * (fi + 2.0F) * 2.0F - t);
  }
  const V3 arg = v + V3{0.0F, 2.0F, 4.0F};
  return rgb(0.5F + 0.5F * V3{std::cos(arg.x), std::cos(arg.y), std::cos(arg.z)});
}

V3 hsv2rgb(V3 c) {
  const V3 k = V3{c.x, c.x, c.x} + V3{1.0F, 2.0F / 3.0F, 1.0F / 3.0F};
  const V3 f = V3{fract(k.x), fract(k.y), fract(k.z)} * 6.0F - 3.0F;
  const V3 p{std::fabs(f.x), std::fabs(f.y), std::fabs(f.z)};
  const V3 q = p - 1.0F;
  const V3 cl{clampf(q.x, 0.0F, 1.0F), clampf(q.y, 0.0F, 1.0F), clampf(q.z, 0.0F, 1.0F)};
  return c.z * mix(V3{1.0F, 1.0F, 1.0F}, cl, c.y);
}

Vec4f hsv(float fx, float fy, Size s, float t, const RgbImage*) {
  const V2 uv = uv_of(fx, fy, s);
  return rgb(hsv2rgb(V3{uv.x + 0.1F * t, 0.8F, 0.3F + 0.7F * uv.y}));
}

Vec4f texture_rotate(float fx, float fy, Size s, float t, const RgbImage* ch0) {
  const V2 uv = uv_of(fx, fy, s) - 0.5F;
  const float a = 0.3F * t;
  // Column-major mat2(c, s, -s, c) times uv.
  const V2 col0{std::cos(a), std::sin(a)};
  const V2 col1{-std::sin(a), std::cos(a)};
  const V2 r{col0.x * uv.x + col1.x * uv.y, col0.y * uv.x + col1.y * uv.y};
  const V2 q = r * 1.7F + 0.5F;
  return rgb(texture_repeat(*ch0, q) * V3{1.0F, 0.9F, 0.8F});
}

float tri(float x) { return std::fabs(fract(x) - 0.5F) * 2.0F; }

Vec4f functions(float fx, float fy, Size s, float, const RgbImage*) {
  const V2 uv = uv_of(fx, fy, s);
  const V3 tint{0.9F, 0.7F, 0.4F};
  V3 acc{0.0F, 0.0F, 0.0F};
  float total = 0.0F;
  for (int i = 0; i < 6; ++i) {
    const float w = tri(uv.x * static_cast<float>(i + 1) + uv.y) / 6.0F;
    acc = acc + tint * w;
    total += w * 2.0F;
  }
  const int cell = static_cast<int>(std::floor(uv.x * 4.0F)) +
                   4 * static_cast<int>(std::floor(uv.y * 4.0F));
  const float parity = (cell / 2) * 2 == cell ? 1.0F : 0.6F;
  return rgb(acc * parity + V3{0.0F, 0.0F, total / 24.0F});
}

Vec4f sdf(float fx, float fy, Size s, float, const RgbImage*) {
  const V2 p = centred(fx, fy, s);
  const float c = length(p - V2{-0.5F, 0.0F}) - 0.45F;
  const V2 q = p - V2{0.55F, 0.1F};
  const V2 d{std::fabs(q.x) - 0.3F, std::fabs(q.y) - 0.5F};
  const float b = length(V2{std::fmax(d.x, 0.0F), std::fmax(d.y, 0.0F)}) +
                  std::fmin(std::fmax(d.x, d.y), 0.0F);
  const float dist = std::fmin(c, b);
  const float edge = 1.0F - smoothstep(0.0F, 0.05F, std::fabs(dist));
  const V3 base = dist < 0.0F ? V3{0.9F, 0.5F, 0.2F} : V3{0.15F, 0.2F, 0.3F};
  return rgb(mix(base, V3{1.0F, 1.0F, 1.0F}, edge));
}

Vec4f lighting(float fx, float fy, Size s, float t, const RgbImage*) {
  const V2 p = centred(fx, fy, s);
  const float r2 = dot(p, p);
  if (!(r2 < 0.81F)) {
    return {0.05F, 0.05F, 0.1F, 1.0F};
  }
  const V3 n = normalize(V3{p.x, p.y, std::sqrt(0.81F - r2)});
  const V3 l = normalize(V3{std::cos(t), 0.6F, 0.8F});
  const V3 v{0.0F, 0.0F, 1.0F};
  const float diffuse = std::fmax(dot(n, l), 0.0F);
  const V3 i{-l.x, -l.y, -l.z};
  const float k = 2.0F * dot(n, i);
  const V3 refl = i - n * k;
  const float spec = std::pow(std::fmax(dot(refl, v), 0.0F), 16.0F);
  const V3 c = V3{0.2F, 0.5F, 0.9F} * diffuse;
  // Columns (1, .1, 0), (0, .9, .1), (.1, 0, .8).
  const V3 warm{1.0F * c.x + 0.0F * c.y + 0.1F * c.z, 0.1F * c.x + 0.9F * c.y + 0.0F * c.z,
                0.0F * c.x + 0.1F * c.y + 0.8F * c.z};
  return rgb(warm + V3{spec, spec, spec});
}

std::uint8_t quantize(float v) {
  if (std::isnan(v)) return 0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0F, 1.0F) * 255.0F));
}

}  // namespace

const std::vector<GoldenCase>& cases() {
  static const std::vector<GoldenCase> all{
      {"solid", {64, 48}, 1.5, false, solid},
      {"gradient", {64, 48}, 1.5, false, gradient},
      {"swizzle", {64, 48}, 1.5, false, swizzle},
      {"rings", {64, 48}, 1.5, false, rings},
      {"plasma", {64, 48}, 1.5, false, plasma},
      {"hsv", {64, 48}, 1.5, false, hsv},
      {"texture_rotate", {64, 48}, 1.5, true, texture_rotate},
      {"functions", {64, 48}, 1.5, false, functions},
      {"sdf", {64, 48}, 1.5, false, sdf},
      {"lighting", {64, 48}, 1.5, false, lighting},
  };
  return all;
}

const RgbImage& channel0_texture() {
  static const RgbImage texture = [] {
    RgbImage img(32, 32);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const bool check = ((x / 4) + (y / 4)) % 2 == 0;
        img.at(x, y) = Rgb8{static_cast<std::uint8_t>(x * 255 / 31),
                            static_cast<std::uint8_t>(y * 255 / 31),
                            static_cast<std::uint8_t>(check ? 230 : 30)};
      }
    }
    return img;
  }();
  return texture;
}

RgbImage render_reference(const GoldenCase& c) {
  RgbImage out(c.size);
  const float t = static_cast<float>(c.time);
  for (int row = 0; row < c.size.height; ++row) {
    const float fy = static_cast<float>(c.size.height - 1 - row) + 0.5F;
    for (int x = 0; x < c.size.width; ++x) {
      const Vec4f v = c.pixel(static_cast<float>(x) + 0.5F, fy, c.size, t,
                              c.uses_channel0 ? &channel0_texture() : nullptr);
      out.at(x, row) = Rgb8{quantize(v.r), quantize(v.g), quantize(v.b)};
    }
  }
  return out;
}

}  // namespace procam::golden

#pragma once

// Native float renderers for the golden shader suite. Each one evaluates the
// same maths as tests/shaders/<name>.glsl directly in C++.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "procam/image.hpp"

namespace procam::golden {

struct Vec4f {
  float r = 0.0F;
  float g = 0.0F;
  float b = 0.0F;
  float a = 1.0F;
};

struct GoldenCase {
  std::string name;  // tests/shaders/<name>.glsl, tests/golden/<name>.png
  Size size{64, 48};
  double time = 1.5;
  bool uses_channel0 = false;
  std::function<Vec4f(float frag_x, float frag_y, Size size, float time, const RgbImage* ch0)>
      pixel;
};

const std::vector<GoldenCase>& cases();

/// 32x32 ramp-and-checker texture bound to iChannel0.
const RgbImage& channel0_texture();

/// Runs the native renderer with the interpreter's pixel conventions.
RgbImage render_reference(const GoldenCase& c);

}  // namespace procam::golden

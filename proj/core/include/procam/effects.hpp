#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procam/image.hpp"
#include "procam/masks.hpp"

namespace procam::shader {
class Program;
}

namespace procam::fx {

// --- Edges ------------------------------------------------------------------

/// Canny with a fully pinned pipeline:
///   luma (0.299, 0.587, 0.114)
///   -> separable Gaussian, radius ceil(3 sigma), clamp-to-edge
///   -> 3x3 Sobel, clamp-to-edge, magnitude sqrt(gx^2 + gy^2)
///   -> non-maximum suppression over 4 direction bins
///   -> hysteresis: strong >= high * Gmax, weak >= low * Gmax kept when
///      8-connected to strong.
/// Gmax is the largest gradient magnitude before suppression. Along the
/// gradient a pixel must beat its trailing neighbour strictly and its leading
/// neighbour or tie, so plateaus of width two thin to one pixel.
/// Returns 1 for edge pixels. Throws InvalidArgument unless sigma > 0 and
/// 0 <= low < high <= 1.
BinaryImage canny(const RgbImage& image, double sigma, double low, double high);

struct EdgeChain {
  std::vector<PixelCoord> points;
  double arc_length = 0.0;  // includes the closing step for loops
  bool closed = false;
};

/// Links edge pixels into 8-connected chains. Walks start at endpoints
/// (exactly one edge neighbour) in raster order, then cover what is left.
/// A walk stops after entering a junction (more than two edge neighbours).
/// Chains with fewer than `min_chain_length` points are dropped.
std::vector<EdgeChain> trace_chains(const BinaryImage& edges, int min_chain_length = 8);

// --- Effect descriptions ------------------------------------------------------

enum class EffectKind { Tron, Distort, Cartoon, Shader };

std::string_view to_string(EffectKind kind);

struct TronParams {
  double speed = 120.0;        // px/s along the chain
  double pulse_sigma = 6.0;    // px
  double base_glow = 0.15;
  Rgb8 color{0, 255, 255};
  double canny_sigma = 1.0;
  double canny_low = 0.2;
  double canny_high = 0.5;
  int min_chain_length = 8;
};

struct DistortParams {
  double amplitude = 4.0;       // px
  double spatial_freq = 0.05;   // 1/px
  double temporal_freq = 0.5;   // Hz
};

struct CartoonParams {
  int smooth_iters = 3;
  double sigma_spatial = 3.0;  // px
  double sigma_range = 30.0;   // RGB units
  int levels = 6;
};

enum class Wrap { Repeat, Clamp };

struct ShaderParams {
  Wrap wrap = Wrap::Repeat;  // sampling mode of iChannel0 (the scene)
  double fps = 60.0;         // drives iFrame and iTimeDelta
};

struct EffectSpec {
  EffectKind kind = EffectKind::Tron;
  std::optional<std::string> mask;  // mask id; absent = full frame
  std::uint64_t seed = 0;
  TronParams tron;
  DistortParams distort;
  CartoonParams cartoon;
  ShaderParams shader;
  std::string shader_source;
};

/// Throws InvalidArgument when a parameter is outside its range or a shader
/// effect has no source.
void validate(const EffectSpec& spec);

/// Parses `{"kind", "mask", "seed", "params", "shader_source"}`. Unknown kinds
/// and unknown parameter names are FormatErrors; ranges are checked by validate().
EffectSpec parse_effect_spec(std::string_view json_text);
std::string to_json(const EffectSpec& spec);

// --- Renderers ----------------------------------------------------------------

/// Glowing pulses travelling along each chain. Black background; pixels
/// outside `mask` (when given) stay black.
RgbImage render_tron(const std::vector<EdgeChain>& chains, Size size, double t,
                     const TronParams& params, std::uint64_t seed,
                     const masks::Mask* mask = nullptr);

/// Arc position of chain `index`'s pulse centre at time t.
double tron_pulse_center(const EdgeChain& chain, std::size_t index, double t,
                         const TronParams& params, std::uint64_t seed);

/// Sinusoidal warp, bilinear with clamped borders. Outside `mask` the source
/// passes through.
RgbImage render_distort(const RgbImage& source, double t, const DistortParams& params,
                        const masks::Mask* mask = nullptr);

/// Bilateral smoothing, per-channel quantization to bin centres, then black
/// Canny (sigma 1, 0.2, 0.5) edges of the quantized image.
RgbImage render_cartoon(const RgbImage& source, const CartoonParams& params,
                        const masks::Mask* mask = nullptr);

RgbImage bilateral_filter(const RgbImage& source, double sigma_spatial, double sigma_range);
std::uint8_t quantize_channel(std::uint8_t value, int levels);

/// An effect bound to a scene with its per-scene work done once (edge chains
/// traced, shader compiled). Rendering is a pure function of t.
class PreparedEffect {
 public:
  /// Throws InvalidArgument if the effect spec references a mask but none is given,
  /// or the mask size differs from the scene; shader::CompileError if the
  /// shader does not compile.
  PreparedEffect(EffectSpec spec, RgbImage scene, std::optional<masks::Mask> mask = std::nullopt);

  RgbImage render(double t) const;

  const EffectSpec& spec() const { return spec_; }
  const std::vector<EdgeChain>& chains() const { return chains_; }

 private:
  EffectSpec spec_;
  RgbImage scene_;
  std::optional<masks::Mask> mask_;
  std::vector<EdgeChain> chains_;
  std::shared_ptr<const shader::Program> program_;
};

/// Convenience: PreparedEffect(spec, scene, mask).render(t).
RgbImage render_effect(const EffectSpec& spec, const RgbImage& scene, double t,
                       const masks::Mask* mask = nullptr);

}  // namespace procam::fx

#include "procam/effects.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "procam/shaderlang.hpp"

namespace procam::fx {
namespace {

// Temporal phases are snapped to 2^-20 of a cycle so that t and t + period
// land on the same phase despite rounding in the multiplication.
double periodic_phase(double cycles) {
  constexpr double kSteps = 1048576.0;
  double frac = cycles - std::floor(cycles);
  frac = std::round(frac * kSteps) / kSteps;
  return frac >= 1.0 ? 0.0 : frac;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

bool outside(const masks::Mask* mask, int x, int y) {
  return mask != nullptr && mask->at(x, y) == 0;
}

void check_mask(const masks::Mask* mask, Size size) {
  if (mask != nullptr && mask->size() != size) {
    throw DimensionMismatch("mask is " + format_size(mask->size()) + " but the scene is " +
                            format_size(size));
  }
}

Rgb8 sample_bilinear_clamped(const RgbImage& image, double sx, double sy) {
  sx = std::clamp(sx, 0.0, static_cast<double>(image.width() - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(image.height() - 1));
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, image.width() - 1);
  const int y1 = std::min(y0 + 1, image.height() - 1);
  const double fx = sx - x0;
  const double fy = sy - y0;
  const auto mix = [&](auto channel) {
    const double top = channel(image.at(x0, y0)) * (1.0 - fx) + channel(image.at(x1, y0)) * fx;
    const double bottom = channel(image.at(x0, y1)) * (1.0 - fx) + channel(image.at(x1, y1)) * fx;
    return to_byte(top * (1.0 - fy) + bottom * fy);
  };
  return {mix([](Rgb8 c) { return c.r; }), mix([](Rgb8 c) { return c.g; }),
          mix([](Rgb8 c) { return c.b; })};
}

}  // namespace

std::string_view to_string(EffectKind kind) {
  switch (kind) {
    case EffectKind::Tron: return "tron";
    case EffectKind::Distort: return "distort";
    case EffectKind::Cartoon: return "cartoon";
    case EffectKind::Shader: return "shader";
  }
  return "unknown";
}

double tron_pulse_center(const EdgeChain& chain, std::size_t index, double t,
                         const TronParams& params, std::uint64_t seed) {
  const double length = chain.arc_length;
  if (!(length > 0.0)) {
    return 0.0;
  }
  const auto hash = splitmix64(seed ^ static_cast<std::uint64_t>(index));
  const double unit = static_cast<double>(hash >> 11) * 0x1.0p-53;
  const double phase = unit * length;
  const double travelled = periodic_phase(params.speed * t / length) * length;
  return std::fmod(travelled + phase, length);
}

RgbImage render_tron(const std::vector<EdgeChain>& chains, Size size, double t,
                     const TronParams& params, std::uint64_t seed, const masks::Mask* mask) {
  check_mask(mask, size);
  RgbImage frame(size);
  const double two_sigma_sq = 2.0 * params.pulse_sigma * params.pulse_sigma;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const auto& chain = chains[i];
    const double center = tron_pulse_center(chain, i, t, params, seed);
    double arc = 0.0;
    for (std::size_t j = 0; j < chain.points.size(); ++j) {
      const auto& p = chain.points[j];
      if (j > 0) {
        const auto& q = chain.points[j - 1];
        arc += (p.x != q.x && p.y != q.y) ? std::sqrt(2.0) : 1.0;
      }
      double d = std::abs(arc - center);
      if (chain.closed) {
        d = std::min(d, chain.arc_length - d);
      }
      if (!frame.contains(p) || outside(mask, p.x, p.y)) {
        continue;
      }
      const double alpha =
          params.base_glow + (1.0 - params.base_glow) * std::exp(-(d * d) / two_sigma_sq);
      // Over a black background: out = colour * alpha.
      frame.at(p) = Rgb8{to_byte(params.color.r * alpha), to_byte(params.color.g * alpha),
                         to_byte(params.color.b * alpha)};
    }
  }
  return frame;
}

RgbImage render_distort(const RgbImage& source, double t, const DistortParams& params,
                        const masks::Mask* mask) {
  check_mask(mask, source.size());
  RgbImage out(source.size());
  const double phase = periodic_phase(params.temporal_freq * t);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (int y = 0; y < source.height(); ++y) {
    const double dx = params.amplitude * std::sin(kTwoPi * (params.spatial_freq * y + phase));
    for (int x = 0; x < source.width(); ++x) {
      if (outside(mask, x, y)) {
        out.at(x, y) = source.at(x, y);
        continue;
      }
      const double dy = params.amplitude * std::sin(kTwoPi * (params.spatial_freq * x + phase));
      out.at(x, y) = sample_bilinear_clamped(source, x + dx, y + dy);
    }
  }
  return out;
}

RgbImage bilateral_filter(const RgbImage& source, double sigma_spatial, double sigma_range) {
  constexpr int kRadius = 2;
  const double spatial_den = 2.0 * sigma_spatial * sigma_spatial;
  const double range_den = 2.0 * sigma_range * sigma_range;
  RgbImage out(source.size());
  for (int y = 0; y < source.height(); ++y) {
    for (int x = 0; x < source.width(); ++x) {
      const Rgb8 c = source.at(x, y);
      double weight = 0.0;
      std::array<double, 3> acc{0.0, 0.0, 0.0};
      for (int dy = -kRadius; dy <= kRadius; ++dy) {
        for (int dx = -kRadius; dx <= kRadius; ++dx) {
          if (!source.contains(x + dx, y + dy)) {
            continue;
          }
          const Rgb8 q = source.at(x + dx, y + dy);
          const double dr = c.r - q.r;
          const double dg = c.g - q.g;
          const double db = c.b - q.b;
          const double w = std::exp(-(dx * dx + dy * dy) / spatial_den) *
                           std::exp(-(dr * dr + dg * dg + db * db) / range_den);
          weight += w;
          acc[0] += w * q.r;
          acc[1] += w * q.g;
          acc[2] += w * q.b;
        }
      }
      out.at(x, y) = Rgb8{to_byte(acc[0] / weight), to_byte(acc[1] / weight),
                          to_byte(acc[2] / weight)};
    }
  }
  return out;
}

std::uint8_t quantize_channel(std::uint8_t value, int levels) {
  const double width = 256.0 / levels;
  const int bin = std::min(levels - 1, static_cast<int>(value * levels / 256));
  return to_byte((bin + 0.5) * width - 0.5);
}

RgbImage render_cartoon(const RgbImage& source, const CartoonParams& params,
                        const masks::Mask* mask) {
  if (params.levels < 2) {
    throw InvalidArgument("cartoon levels must be at least 2");
  }
  check_mask(mask, source.size());
  RgbImage smooth = source;
  for (int i = 0; i < params.smooth_iters; ++i) {
    smooth = bilateral_filter(smooth, params.sigma_spatial, params.sigma_range);
  }
  for (auto& px : smooth.pixels()) {
    px = Rgb8{quantize_channel(px.r, params.levels), quantize_channel(px.g, params.levels),
              quantize_channel(px.b, params.levels)};
  }
  const auto edges = canny(smooth, 1.0, 0.2, 0.5);
  RgbImage out(source.size());
  for (int y = 0; y < source.height(); ++y) {
    for (int x = 0; x < source.width(); ++x) {
      if (outside(mask, x, y)) {
        out.at(x, y) = source.at(x, y);
      } else {
        out.at(x, y) = edges.at(x, y) != 0 ? Rgb8{} : smooth.at(x, y);
      }
    }
  }
  return out;
}

PreparedEffect::PreparedEffect(EffectSpec spec, RgbImage scene, std::optional<masks::Mask> mask)
    : spec_(std::move(spec)), scene_(std::move(scene)), mask_(std::move(mask)) {
  validate(spec_);
  if (spec_.mask && !mask_) {
    throw InvalidArgument("effect references mask '" + *spec_.mask + "' but none was supplied");
  }
  if (mask_) {
    check_mask(&*mask_, scene_.size());
  }
  switch (spec_.kind) {
    case EffectKind::Tron: {
      const auto& p = spec_.tron;
      chains_ = trace_chains(canny(scene_, p.canny_sigma, p.canny_low, p.canny_high),
                             p.min_chain_length);
      break;
    }
    case EffectKind::Shader: {
      auto result = shader::compile(spec_.shader_source);
      if (!result.program) {
        throw shader::CompileError(std::move(result.diagnostics));
      }
      program_ = std::move(result.program);
      break;
    }
    default:
      break;
  }
}

RgbImage PreparedEffect::render(double t) const {
  if (!(t >= 0.0)) {
    throw InvalidArgument("effect time must be non-negative");
  }
  const masks::Mask* mask = mask_ ? &*mask_ : nullptr;
  switch (spec_.kind) {
    case EffectKind::Tron:
      return render_tron(chains_, scene_.size(), t, spec_.tron, spec_.seed, mask);
    case EffectKind::Distort:
      return render_distort(scene_, t, spec_.distort, mask);
    case EffectKind::Cartoon:
      return render_cartoon(scene_, spec_.cartoon, mask);
    case EffectKind::Shader: {
      shader::Uniforms uniforms;
      uniforms.time = t;
      uniforms.time_delta = 1.0 / spec_.shader.fps;
      uniforms.frame = static_cast<int>(std::floor(t * spec_.shader.fps));
      uniforms.channels[0] = shader::Channel{
          std::make_shared<const RgbImage>(scene_),
          spec_.shader.wrap == Wrap::Clamp ? shader::ChannelWrap::Clamp
                                           : shader::ChannelWrap::Repeat};
      auto frame = shader::render_frame(*program_, uniforms, scene_.size());
      if (mask != nullptr) {
        for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
          if (mask->pixels()[i] == 0) {
            frame.pixels()[i] = scene_.pixels()[i];
          }
        }
      }
      return frame;
    }
  }
  throw InvalidArgument("unknown effect kind");
}

RgbImage render_effect(const EffectSpec& spec, const RgbImage& scene, double t,
                       const masks::Mask* mask) {
  std::optional<masks::Mask> owned;
  if (mask != nullptr) {
    owned = *mask;
  }
  return PreparedEffect(spec, scene, std::move(owned)).render(t);
}

}  // namespace procam::fx

#pragma once

#include <cstdint>

#include "procam/image.hpp"
#include "procam/slcodec.hpp"

namespace procam::projimage {

enum class PixelState : std::uint8_t { Hole, Covered, Filled };

/// The scene resampled into the projector's pixel grid.
struct ProjectorImage {
  RgbImage color;
  Image<double> coverage;  // accumulated splat weight; 0 for holes
  Image<PixelState> state;

  ProjectorImage() = default;
  explicit ProjectorImage(Size size)
      : color(size), coverage(size, 0.0), state(size, PixelState::Hole) {}

  Size size() const { return color.size(); }
  std::size_t count(PixelState s) const;
};

/// Forward-splats each valid camera pixel into the four projector pixels
/// around (proj_x, proj_y) with bilinear weights, then normalizes.
///
/// Weights are accumulated in 32.32 fixed point so the result does not depend
/// on how camera rows are partitioned across `tiles` (0 = one per thread).
ProjectorImage reconstruct(const sl::CorrespondenceMap& corr, const RgbImage& camera_color,
                           Size projector_size, unsigned tiles = 0);

/// Bounded dilation: each pass, a hole with at least one non-hole 8-neighbour
/// takes the coverage-weighted mean of those neighbours. Holes left after
/// `max_radius` passes stay black with coverage 0.
ProjectorImage fill_holes(const ProjectorImage& image, int max_radius = 8);

/// Coverage as 16-bit grey: value = min(65535, round(coverage * 4096)).
Gray16Image coverage_image(const ProjectorImage& image);

}  // namespace procam::projimage

#pragma once

#include <span>
#include <vector>

#include "procam/image.hpp"

namespace procam::masks {

/// Binary region in projector-image space; member pixels hold 1.
using Mask = Image<std::uint8_t>;

/// 8-connected pixel sequence with no zero-length steps.
using LassoPath = std::vector<PixelCoord>;

enum class Connectivity { Four = 4, Eight = 8 };

/// Flood fill from `seed` over pixels whose Euclidean RGB distance to the seed
/// colour is <= tolerance. Throws InvalidArgument if the seed is outside.
Mask magic_wand(const RgbImage& image, PixelCoord seed, double tolerance,
                Connectivity connectivity = Connectivity::Eight);

/// Region growing from the scribble with the mean scribble colour as the
/// reference, admitting 8-connected pixels within `tolerance` until nothing
/// changes. Scribble pixels are always members.
Mask quick_select(const RgbImage& image, std::span<const PixelCoord> scribble, double tolerance);

/// Live-wire edge strength: Sobel magnitude of luma divided by its maximum,
/// so values lie in [0, 1] (all zero for a flat image).
Image<double> edge_strength(const RgbImage& image);

/// Minimum-cost 8-connected path through each consecutive anchor pair where
/// stepping onto p costs (1 - G(p)) * step_length. Ties resolve by the
/// neighbour order N, NE, E, SE, S, SW, W, NW.
LassoPath magnetic_lasso(const RgbImage& image, std::span<const PixelCoord> anchors);

/// Sum of step costs along `path`, accumulated from the first point.
double path_cost(const Image<double>& strength, const LassoPath& path);

/// Even-odd fill of the path closed by a straight segment back to its start,
/// boundary pixels included. Zero-area paths give an empty mask.
Mask path_to_mask(const LassoPath& path, Size size);

std::size_t area(const Mask& mask);

/// 255 for members, 0 otherwise.
GrayImage to_gray(const Mask& mask);
/// Pixels >= 128 become members.
Mask from_gray(const GrayImage& image);

}  // namespace procam::masks

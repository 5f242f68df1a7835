#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "procam/image.hpp"

namespace procam::io {

// PNG. Readers convert whatever is on disk to the requested pixel format.
GrayImage read_png_gray(const std::filesystem::path& path);
RgbImage read_png_rgb(const std::filesystem::path& path);
Gray16Image read_png_gray16(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const GrayImage& image);
void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const Gray16Image& image);

std::vector<std::uint8_t> encode_png(const GrayImage& image);
std::vector<std::uint8_t> encode_png(const RgbImage& image);
GrayImage decode_png_gray(std::span<const std::uint8_t> bytes);
RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes);

// Portable float map, single channel, little-endian (scale -1.0). Rows are
// stored bottom-to-top on disk as the format requires.
void write_pfm(const std::filesystem::path& path, const FloatImage& image);
FloatImage read_pfm(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace procam::io

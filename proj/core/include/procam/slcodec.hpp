#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procam/image.hpp"

namespace procam::sl {

/// Reflected binary code: n ^ (n >> 1).
constexpr std::uint32_t gray_encode(std::uint32_t n) { return n ^ (n >> 1); }

/// Inverse of gray_encode by prefix XOR.
constexpr std::uint32_t gray_decode(std::uint32_t g) {
  for (std::uint32_t shift = 1; shift < 32; shift <<= 1) {
    g ^= g >> shift;
  }
  return g;
}

/// ceil(log2(extent)); 0 for extent == 1.
int bits_for(int extent);

enum class FrameKind { White, Black, XBit, XBitInverse, YBit, YBitInverse };

struct FrameRole {
  FrameKind kind = FrameKind::White;
  int bit = -1;  // bit index for the *Bit kinds, -1 otherwise

  /// Manifest tag: "white", "black", "x-bit(k)", "x-bit-inv(k)", "y-bit(k)", "y-bit-inv(k)".
  std::string tag() const;
  static FrameRole parse(std::string_view tag);

  friend bool operator==(const FrameRole&, const FrameRole&) = default;
};

/// Frame layout for one projector resolution: white, black, then x bits
/// MSB to LSB (each followed by its inverse), then y bits likewise.
struct PatternManifest {
  int projector_width = 0;
  int projector_height = 0;
  std::vector<FrameRole> roles;

  static PatternManifest for_projector(int width, int height);

  int x_bits() const { return bits_for(projector_width); }
  int y_bits() const { return bits_for(projector_height); }
  std::size_t frame_count() const { return roles.size(); }

  friend bool operator==(const PatternManifest&, const PatternManifest&) = default;
};

/// 2 + 2*ceil(log2 w) + 2*ceil(log2 h).
std::size_t pattern_frame_count(int projector_width, int projector_height);

struct PatternSet {
  PatternManifest manifest;
  std::vector<GrayImage> frames;
};

/// Throws InvalidArgument unless 1 <= width, height <= 8192.
PatternSet generate_patterns(int projector_width, int projector_height);

struct Correspondence {
  float proj_x = 0.0F;
  float proj_y = 0.0F;
  float confidence = 0.0F;
  bool valid = false;

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

/// Per camera pixel: the projector pixel that lit it, with a confidence.
class CorrespondenceMap {
 public:
  CorrespondenceMap() = default;
  CorrespondenceMap(Size camera, Size projector);

  Size camera_size() const { return entries_.size(); }
  Size projector_size() const { return projector_; }

  Correspondence& at(int x, int y) { return entries_.at(x, y); }
  const Correspondence& at(int x, int y) const { return entries_.at(x, y); }
  std::span<const Correspondence> entries() const { return entries_.pixels(); }
  std::span<Correspondence> entries() { return entries_.pixels(); }

  std::size_t valid_count() const;
  double valid_fraction() const;

  /// Throws FormatError if a valid entry lies outside the projector or an
  /// invalid entry carries non-zero confidence.
  void check_invariants() const;

  friend bool operator==(const CorrespondenceMap&, const CorrespondenceMap&) = default;

 private:
  Size projector_;
  Image<Correspondence> entries_;
};

struct DecodeOptions {
  double contrast_threshold = 0.05;  // fraction of full scale
  unsigned threads = 0;              // 0 = default_thread_count()
};

/// Decodes complementary Gray-code captures. Frame order must follow the
/// manifest; throws DimensionMismatch on a count or size mismatch.
CorrespondenceMap decode(std::span<const GrayImage> captures, const PatternManifest& manifest,
                         const DecodeOptions& options = {});

// --- LFCM binary format --------------------------------------------------

std::vector<std::uint8_t> encode_lfcm(const CorrespondenceMap& map);
CorrespondenceMap decode_lfcm(std::span<const std::uint8_t> bytes);
void write_lfcm(const std::filesystem::path& path, const CorrespondenceMap& map);
CorrespondenceMap read_lfcm(const std::filesystem::path& path);

// --- Pattern / capture directories ---------------------------------------

/// Writes pattern_000.png ... plus manifest.json.
void write_pattern_dir(const std::filesystem::path& dir, const PatternSet& patterns);
PatternSet read_pattern_dir(const std::filesystem::path& dir);

/// Writes frames as `<prefix>_NNN.png` plus a manifest.json naming them.
void write_frame_dir(const std::filesystem::path& dir, std::string_view prefix,
                     const PatternManifest& manifest, std::span<const GrayImage> frames);

/// Reads a capture directory. Uses manifest.json when present, otherwise
/// every *.png in lexicographic order.
std::vector<GrayImage> read_capture_dir(const std::filesystem::path& dir);

std::string manifest_to_json(const PatternManifest& manifest,
                             std::span<const std::string> files);
PatternManifest manifest_from_json(std::string_view text, std::vector<std::string>* files = nullptr);

}  // namespace procam::sl

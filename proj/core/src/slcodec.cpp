#include "procam/slcodec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "procam/parallel.hpp"

namespace procam::sl {
namespace {

constexpr int kMaxProjectorExtent = 8192;

std::string_view kind_prefix(FrameKind kind) {
  switch (kind) {
    case FrameKind::XBit: return "x-bit(";
    case FrameKind::XBitInverse: return "x-bit-inv(";
    case FrameKind::YBit: return "y-bit(";
    case FrameKind::YBitInverse: return "y-bit-inv(";
    default: return "";
  }
}

// Bit frame: pixel is 255 iff bit `bit` of gray_encode(coordinate) is set.
GrayImage bit_frame(int width, int height, bool along_x, int bit, bool inverse) {
  GrayImage frame(width, height);
  for (int y = 0; y < height; ++y) {
    auto row = frame.row(y);
    for (int x = 0; x < width; ++x) {
      const auto coord = static_cast<std::uint32_t>(along_x ? x : y);
      const bool set = ((gray_encode(coord) >> bit) & 1U) != 0;
      row[static_cast<std::size_t>(x)] = (set != inverse) ? 255 : 0;
    }
  }
  return frame;
}

}  // namespace

int bits_for(int extent) {
  int bits = 0;
  while ((1LL << bits) < extent) {
    ++bits;
  }
  return bits;
}

std::string FrameRole::tag() const {
  switch (kind) {
    case FrameKind::White: return "white";
    case FrameKind::Black: return "black";
    default: return std::string(kind_prefix(kind)) + std::to_string(bit) + ")";
  }
}

FrameRole FrameRole::parse(std::string_view tag) {
  if (tag == "white") {
    return {FrameKind::White, -1};
  }
  if (tag == "black") {
    return {FrameKind::Black, -1};
  }
  for (auto kind : {FrameKind::XBitInverse, FrameKind::XBit, FrameKind::YBitInverse,
                    FrameKind::YBit}) {
    const auto prefix = kind_prefix(kind);
    if (tag.starts_with(prefix) && tag.ends_with(")")) {
      const auto digits = tag.substr(prefix.size(), tag.size() - prefix.size() - 1);
      int bit = -1;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), bit);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && bit >= 0 && bit < 31) {
        return {kind, bit};
      }
    }
  }
  throw FormatError("unknown frame role '" + std::string(tag) + "'");
}

PatternManifest PatternManifest::for_projector(int width, int height) {
  if (width < 1 || height < 1 || width > kMaxProjectorExtent || height > kMaxProjectorExtent) {
    throw InvalidArgument("projector size " + std::to_string(width) + "x" +
                          std::to_string(height) + " outside 1..8192");
  }
  PatternManifest manifest{width, height, {}};
  manifest.roles.push_back({FrameKind::White, -1});
  manifest.roles.push_back({FrameKind::Black, -1});
  for (int k = bits_for(width) - 1; k >= 0; --k) {
    manifest.roles.push_back({FrameKind::XBit, k});
    manifest.roles.push_back({FrameKind::XBitInverse, k});
  }
  for (int k = bits_for(height) - 1; k >= 0; --k) {
    manifest.roles.push_back({FrameKind::YBit, k});
    manifest.roles.push_back({FrameKind::YBitInverse, k});
  }
  return manifest;
}

std::size_t pattern_frame_count(int projector_width, int projector_height) {
  return 2 + 2 * static_cast<std::size_t>(bits_for(projector_width)) +
         2 * static_cast<std::size_t>(bits_for(projector_height));
}

PatternSet generate_patterns(int projector_width, int projector_height) {
  PatternSet set{PatternManifest::for_projector(projector_width, projector_height), {}};
  set.frames.reserve(set.manifest.frame_count());
  for (const auto& role : set.manifest.roles) {
    switch (role.kind) {
      case FrameKind::White:
        set.frames.emplace_back(projector_width, projector_height, std::uint8_t{255});
        break;
      case FrameKind::Black:
        set.frames.emplace_back(projector_width, projector_height, std::uint8_t{0});
        break;
      case FrameKind::XBit:
      case FrameKind::XBitInverse:
        set.frames.push_back(bit_frame(projector_width, projector_height, true, role.bit,
                                       role.kind == FrameKind::XBitInverse));
        break;
      case FrameKind::YBit:
      case FrameKind::YBitInverse:
        set.frames.push_back(bit_frame(projector_width, projector_height, false, role.bit,
                                       role.kind == FrameKind::YBitInverse));
        break;
    }
  }
  return set;
}

CorrespondenceMap::CorrespondenceMap(Size camera, Size projector)
    : projector_(projector), entries_(camera) {}

std::size_t CorrespondenceMap::valid_count() const {
  return static_cast<std::size_t>(std::count_if(
      entries().begin(), entries().end(), [](const Correspondence& c) { return c.valid; }));
}

double CorrespondenceMap::valid_fraction() const {
  const auto total = entries().size();
  return total == 0 ? 0.0 : static_cast<double>(valid_count()) / static_cast<double>(total);
}

void CorrespondenceMap::check_invariants() const {
  for (const auto& c : entries()) {
    if (c.valid) {
      if (!(c.proj_x >= 0.0F && c.proj_x < static_cast<float>(projector_.width) &&
            c.proj_y >= 0.0F && c.proj_y < static_cast<float>(projector_.height))) {
        throw FormatError("valid correspondence outside projector bounds");
      }
    } else if (c.confidence != 0.0F) {
      throw FormatError("invalid correspondence with non-zero confidence");
    }
  }
}

CorrespondenceMap decode(std::span<const GrayImage> captures, const PatternManifest& manifest,
                         const DecodeOptions& options) {
  if (captures.size() != manifest.frame_count()) {
    throw DimensionMismatch("expected " + std::to_string(manifest.frame_count()) +
                            " capture frames for a " + std::to_string(manifest.projector_width) +
                            "x" + std::to_string(manifest.projector_height) +
                            " projector, got " + std::to_string(captures.size()));
  }
  const Size camera = captures.front().size();
  for (std::size_t i = 1; i < captures.size(); ++i) {
    if (captures[i].size() != camera) {
      throw DimensionMismatch("capture frame " + std::to_string(i) + " is " +
                              format_size(captures[i].size()) + ", expected " +
                              format_size(camera));
    }
  }

  // Locate each role's frame once so per-pixel work is index arithmetic.
  std::size_t white = 0;
  std::size_t black = 0;
  std::vector<std::pair<std::size_t, std::size_t>> x_pairs(
      static_cast<std::size_t>(manifest.x_bits()));
  std::vector<std::pair<std::size_t, std::size_t>> y_pairs(
      static_cast<std::size_t>(manifest.y_bits()));
  for (std::size_t i = 0; i < manifest.roles.size(); ++i) {
    const auto& role = manifest.roles[i];
    switch (role.kind) {
      case FrameKind::White: white = i; break;
      case FrameKind::Black: black = i; break;
      case FrameKind::XBit: x_pairs.at(static_cast<std::size_t>(role.bit)).first = i; break;
      case FrameKind::XBitInverse: x_pairs.at(static_cast<std::size_t>(role.bit)).second = i; break;
      case FrameKind::YBit: y_pairs.at(static_cast<std::size_t>(role.bit)).first = i; break;
      case FrameKind::YBitInverse: y_pairs.at(static_cast<std::size_t>(role.bit)).second = i; break;
    }
  }

  CorrespondenceMap map(camera, {manifest.projector_width, manifest.projector_height});
  const unsigned threads = options.threads == 0 ? default_thread_count() : options.threads;

  parallel_for_rows(camera.height, threads, [&](int row_begin, int row_end) {
    for (int y = row_begin; y < row_end; ++y) {
      for (int x = 0; x < camera.width; ++x) {
        auto& out = map.at(x, y);
        out = Correspondence{};
        const int lit = captures[white].at(x, y);
        const int dark = captures[black].at(x, y);
        const int range = lit - dark;
        const double contrast = range / 255.0;
        if (range <= 0 || contrast < options.contrast_threshold) {
          continue;
        }
        double confidence = 1.0;
        const auto read_bits = [&](const auto& pairs) {
          std::uint32_t code = 0;
          for (int k = static_cast<int>(pairs.size()) - 1; k >= 0; --k) {
            const auto& [on, off] = pairs[static_cast<std::size_t>(k)];
            const int diff = captures[on].at(x, y) - captures[off].at(x, y);
            code = (code << 1) | (diff > 0 ? 1U : 0U);
            confidence = std::min(confidence, std::min(1.0, std::abs(diff) / double(range)));
          }
          return gray_decode(code);
        };
        const std::uint32_t px = read_bits(x_pairs);
        const std::uint32_t py = read_bits(y_pairs);
        if (px >= static_cast<std::uint32_t>(manifest.projector_width) ||
            py >= static_cast<std::uint32_t>(manifest.projector_height)) {
          continue;
        }
        out.proj_x = static_cast<float>(px);
        out.proj_y = static_cast<float>(py);
        out.confidence = static_cast<float>(confidence);
        out.valid = true;
      }
    }
  });
  return map;
}

}  // namespace procam::sl

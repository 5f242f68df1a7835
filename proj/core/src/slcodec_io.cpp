#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>

#include "procam/image_io.hpp"
#include "procam/slcodec.hpp"

namespace procam::sl {
namespace {

using nlohmann::json;

constexpr std::uint32_t kLfcmVersion = 1;
constexpr std::size_t kLfcmHeaderBytes = 4 + 5 * 4;
constexpr std::size_t kLfcmRecordBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(bytes[offset + static_cast<std::size_t>(i)]) << (8 * i);
  }
  return v;
}

std::string numbered(std::string_view prefix, std::size_t index) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "_%03zu.png", index);
  return std::string(prefix) + buffer;
}

}  // namespace

std::vector<std::uint8_t> encode_lfcm(const CorrespondenceMap& map) {
  const Size camera = map.camera_size();
  const Size projector = map.projector_size();
  std::vector<std::uint8_t> out;
  out.reserve(kLfcmHeaderBytes + map.entries().size() * kLfcmRecordBytes);
  out.insert(out.end(), {'L', 'F', 'C', 'M'});
  put_u32(out, kLfcmVersion);
  put_u32(out, static_cast<std::uint32_t>(camera.width));
  put_u32(out, static_cast<std::uint32_t>(camera.height));
  put_u32(out, static_cast<std::uint32_t>(projector.width));
  put_u32(out, static_cast<std::uint32_t>(projector.height));
  for (const auto& c : map.entries()) {
    put_u32(out, std::bit_cast<std::uint32_t>(c.proj_x));
    put_u32(out, std::bit_cast<std::uint32_t>(c.proj_y));
    put_u32(out, std::bit_cast<std::uint32_t>(c.confidence));
    out.insert(out.end(), {static_cast<std::uint8_t>(c.valid ? 1 : 0), 0, 0, 0});
  }
  return out;
}

CorrespondenceMap decode_lfcm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kLfcmHeaderBytes || !std::equal(bytes.begin(), bytes.begin() + 4, "LFCM")) {
    throw FormatError("not an LFCM file");
  }
  if (get_u32(bytes, 4) != kLfcmVersion) {
    throw FormatError("unsupported LFCM version " + std::to_string(get_u32(bytes, 4)));
  }
  const auto dim = [&](std::size_t offset) {
    const auto v = get_u32(bytes, offset);
    if (v > 1U << 16) {
      throw FormatError("LFCM dimension out of range");
    }
    return static_cast<int>(v);
  };
  const Size camera{dim(8), dim(12)};
  const Size projector{dim(16), dim(20)};
  const std::size_t count =
      static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height);
  if (bytes.size() != kLfcmHeaderBytes + count * kLfcmRecordBytes) {
    throw FormatError("LFCM payload size does not match its header");
  }
  CorrespondenceMap map(camera, projector);
  auto entries = map.entries();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t base = kLfcmHeaderBytes + i * kLfcmRecordBytes;
    entries[i].proj_x = std::bit_cast<float>(get_u32(bytes, base));
    entries[i].proj_y = std::bit_cast<float>(get_u32(bytes, base + 4));
    entries[i].confidence = std::bit_cast<float>(get_u32(bytes, base + 8));
    const auto valid = bytes[base + 12];
    if (valid > 1) {
      throw FormatError("LFCM valid flag must be 0 or 1");
    }
    entries[i].valid = valid == 1;
  }
  return map;
}

void write_lfcm(const std::filesystem::path& path, const CorrespondenceMap& map) {
  io::write_file(path, encode_lfcm(map));
}

CorrespondenceMap read_lfcm(const std::filesystem::path& path) {
  return decode_lfcm(io::read_file(path));
}

std::string manifest_to_json(const PatternManifest& manifest,
                             std::span<const std::string> files) {
  json frames = json::array();
  for (std::size_t i = 0; i < manifest.roles.size(); ++i) {
    json frame{{"role", manifest.roles[i].tag()}};
    if (i < files.size()) {
      frame["file"] = files[i];
    }
    frames.push_back(std::move(frame));
  }
  json doc{{"projector_width", manifest.projector_width},
           {"projector_height", manifest.projector_height},
           {"frames", std::move(frames)}};
  return doc.dump(2);
}

PatternManifest manifest_from_json(std::string_view text, std::vector<std::string>* files) {
  try {
    const auto doc = json::parse(text);
    PatternManifest manifest{doc.at("projector_width").get<int>(),
                             doc.at("projector_height").get<int>(),
                             {}};
    for (const auto& frame : doc.at("frames")) {
      manifest.roles.push_back(FrameRole::parse(frame.at("role").get<std::string>()));
      if (files != nullptr) {
        files->push_back(frame.value("file", std::string{}));
      }
    }
    return manifest;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

void write_frame_dir(const std::filesystem::path& dir, std::string_view prefix,
                     const PatternManifest& manifest, std::span<const GrayImage> frames) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    files.push_back(numbered(prefix, i));
    io::write_png(dir / files.back(), frames[i]);
  }
  const auto text = manifest_to_json(manifest, files);
  io::write_file(dir / "manifest.json",
                 std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_pattern_dir(const std::filesystem::path& dir, const PatternSet& patterns) {
  write_frame_dir(dir, "pattern", patterns.manifest, patterns.frames);
}

PatternSet read_pattern_dir(const std::filesystem::path& dir) {
  const auto bytes = io::read_file(dir / "manifest.json");
  std::vector<std::string> files;
  PatternSet set{manifest_from_json(std::string(bytes.begin(), bytes.end()), &files), {}};
  for (const auto& file : files) {
    set.frames.push_back(io::read_png_gray(dir / file));
  }
  return set;
}

std::vector<GrayImage> read_capture_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError(dir.string() + " is not a directory");
  }
  std::vector<std::string> files;
  if (std::filesystem::exists(dir / "manifest.json")) {
    const auto bytes = io::read_file(dir / "manifest.json");
    manifest_from_json(std::string(bytes.begin(), bytes.end()), &files);
    if (std::any_of(files.begin(), files.end(), [](const auto& f) { return f.empty(); })) {
      throw FormatError("capture manifest lacks file names");
    }
  } else {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") {
        files.push_back(entry.path().filename().string());
      }
    }
    std::sort(files.begin(), files.end());
  }
  std::vector<GrayImage> frames;
  frames.reserve(files.size());
  for (const auto& file : files) {
    frames.push_back(io::read_png_gray(dir / file));
  }
  return frames;
}

}  // namespace procam::sl

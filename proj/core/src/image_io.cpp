#include "procam/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace procam::io {
namespace {

struct PngImage {
  png_image image{};

  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(what + ": " + image.message);
  }
};

template <typename Pixel>
Image<Pixel> decode(std::span<const std::uint8_t> bytes, png_uint_32 format,
                    const std::string& origin) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    png.fail("cannot read PNG " + origin);
  }
  png.image.format = format;
  Image<Pixel> out(static_cast<int>(png.image.width), static_cast<int>(png.image.height));
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&png.image, &background, out.pixels().data(), 0, nullptr)) {
    png.fail("cannot decode PNG " + origin);
  }
  return out;
}

template <typename Pixel>
std::vector<std::uint8_t> encode(const Image<Pixel>& image, png_uint_32 format) {
  if (image.empty()) {
    throw InvalidArgument("cannot encode an empty image as PNG");
  }
  PngImage png;
  png.image.width = static_cast<png_uint_32>(image.width());
  png.image.height = static_cast<png_uint_32>(image.height());
  png.image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, image.pixels().data(), 0,
                                 nullptr)) {
    png.fail("cannot size PNG");
  }
  std::vector<std::uint8_t> buffer(size);
  if (!png_image_write_to_memory(&png.image, buffer.data(), &size, 0, image.pixels().data(), 0,
                                 nullptr)) {
    png.fail("cannot encode PNG");
  }
  buffer.resize(size);
  return buffer;
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw FormatError("short write to " + path.string());
  }
}

GrayImage decode_png_gray(std::span<const std::uint8_t> bytes) {
  // Decode as RGB and apply our own luma so colour files convert the same
  // way everywhere in the pipeline.
  return to_gray(decode<Rgb8>(bytes, PNG_FORMAT_RGB, "from memory"));
}

RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes) {
  return decode<Rgb8>(bytes, PNG_FORMAT_RGB, "from memory");
}

GrayImage read_png_gray(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return to_gray(decode<Rgb8>(bytes, PNG_FORMAT_RGB, path.string()));
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode<Rgb8>(bytes, PNG_FORMAT_RGB, path.string());
}

Gray16Image read_png_gray16(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode<std::uint16_t>(bytes, PNG_FORMAT_LINEAR_Y, path.string());
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  return encode(image, PNG_FORMAT_GRAY);
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  return encode(image, PNG_FORMAT_RGB);
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
  write_file(path, encode(image, PNG_FORMAT_GRAY));
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  write_file(path, encode(image, PNG_FORMAT_RGB));
}

void write_png(const std::filesystem::path& path, const Gray16Image& image) {
  write_file(path, encode(image, PNG_FORMAT_LINEAR_Y));
}

void write_pfm(const std::filesystem::path& path, const FloatImage& image) {
  static_assert(std::endian::native == std::endian::little, "PFM writer assumes little-endian");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("cannot write " + path.string());
  }
  out << "Pf\n" << image.width() << ' ' << image.height() << "\n-1.0\n";
  for (int y = image.height() - 1; y >= 0; --y) {
    const auto row = image.row(y);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size_bytes()));
  }
  if (!out) {
    throw FormatError("short write to " + path.string());
  }
}

FloatImage read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  in.get();
  if (magic != "Pf" || width <= 0 || height <= 0 || scale >= 0.0) {
    throw FormatError(path.string() + " is not a little-endian single-channel PFM");
  }
  FloatImage image(width, height);
  for (int y = height - 1; y >= 0; --y) {
    auto row = image.row(y);
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size_bytes()));
  }
  if (!in) {
    throw FormatError(path.string() + " is truncated");
  }
  return image;
}

}  // namespace procam::io

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "oracles.hpp"
#include "procam/image_io.hpp"
#include "procam/service.hpp"

namespace fs = std::filesystem;
using namespace procam;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("procam_test_image_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Size, ParsesAndFormats) {
  EXPECT_EQ(parse_size("256x128"), (Size{256, 128}));
  EXPECT_EQ(parse_size("3X4"), (Size{3, 4}));
  EXPECT_EQ(format_size({320, 240}), "320x240");
  EXPECT_THROW(parse_size("256"), InvalidArgument);
  EXPECT_THROW(parse_size("0x5"), InvalidArgument);
  EXPECT_THROW(parse_size("5x-1"), InvalidArgument);
  EXPECT_THROW(parse_size("5x5x"), InvalidArgument);
}

TEST(Image, NegativeDimensionsRejected) { EXPECT_THROW(GrayImage(-1, 3), InvalidArgument); }

TEST(Image, LumaConversion) {
  RgbImage rgb(2, 1);
  rgb.at(0, 0) = Rgb8{255, 255, 255};
  rgb.at(1, 0) = Rgb8{100, 0, 0};
  const auto gray = to_gray(rgb);
  EXPECT_EQ(gray.at(0, 0), 255);
  EXPECT_EQ(gray.at(1, 0), 30);  // 29.9 rounds up
  EXPECT_EQ(to_rgb(gray).at(1, 0), (Rgb8{30, 30, 30}));
}

TEST(Png, RoundTripsRgbGrayAndGray16) {
  const auto dir = temp_dir("png");
  const auto rgb = oracle::random_rgb({17, 9}, 1);
  io::write_png(dir / "rgb.png", rgb);
  EXPECT_EQ(io::read_png_rgb(dir / "rgb.png"), rgb);

  const auto gray = to_gray(rgb);
  io::write_png(dir / "gray.png", gray);
  EXPECT_EQ(io::read_png_gray(dir / "gray.png"), gray);
  EXPECT_EQ(io::read_png_rgb(dir / "gray.png"), to_rgb(gray));

  Gray16Image deep(5, 3);
  for (int i = 0; i < 15; ++i) deep.pixels()[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(i * 4000);
  io::write_png(dir / "deep.png", deep);
  EXPECT_EQ(io::read_png_gray16(dir / "deep.png"), deep);
}

TEST(Png, InMemoryCodecMatchesFiles) {
  const auto rgb = oracle::random_rgb({8, 8}, 2);
  EXPECT_EQ(io::decode_png_rgb(io::encode_png(rgb)), rgb);
  const auto gray = to_gray(rgb);
  EXPECT_EQ(io::decode_png_gray(io::encode_png(gray)), gray);
}

TEST(Png, GarbageIsFormatError) {
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
  EXPECT_THROW(io::decode_png_rgb(junk), FormatError);
  EXPECT_THROW(io::read_png_rgb("/nonexistent/file.png"), FormatError);
}

TEST(Pfm, RoundTripsIncludingNaN) {
  const auto dir = temp_dir("pfm");
  FloatImage img(4, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) img.at(x, y) = static_cast<float>(x) + 10.0F * static_cast<float>(y);
  }
  img.at(1, 1) = std::nanf("");
  io::write_pfm(dir / "d.pfm", img);
  const auto back = io::read_pfm(dir / "d.pfm");
  ASSERT_EQ(back.size(), img.size());
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) {
      if (x == 1 && y == 1) {
        EXPECT_TRUE(std::isnan(back.at(x, y)));
      } else {
        EXPECT_EQ(back.at(x, y), img.at(x, y));
      }
    }
  }
}

TEST(Pfm, StoresRowsBottomUp) {
  const auto dir = temp_dir("pfm_order");
  FloatImage img(1, 2);
  img.at(0, 0) = 1.0F;  // top
  img.at(0, 1) = 2.0F;  // bottom
  io::write_pfm(dir / "o.pfm", img);
  const auto bytes = io::read_file(dir / "o.pfm");
  float first = 0.0F;
  std::memcpy(&first, bytes.data() + bytes.size() - 8, 4);
  EXPECT_EQ(first, 2.0F);
}

TEST(Base64, RoundTripsEveryLength) {
  for (std::size_t n = 0; n < 40; ++n) {
    std::vector<std::uint8_t> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<std::uint8_t>(i * 37 + n);
    EXPECT_EQ(service::base64_decode(service::base64_encode(data)), data) << n;
  }
}

TEST(Base64, KnownVectors) {
  const std::string text = "foobar";
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  EXPECT_EQ(service::base64_encode(std::span(bytes).first(1)), "Zg==");
  EXPECT_EQ(service::base64_encode(std::span(bytes).first(2)), "Zm8=");
  EXPECT_EQ(service::base64_encode(bytes), "Zm9vYmFy");
  EXPECT_EQ(service::base64_decode("Zm9v\nYmFy"), bytes);
}

TEST(Base64, RejectsMalformed) {
  EXPECT_THROW(service::base64_decode("Zm9v!"), FormatError);
  EXPECT_THROW(service::base64_decode("Z"), FormatError);
  EXPECT_THROW(service::base64_decode("Zg=a"), FormatError);
  EXPECT_THROW(service::base64_decode("Zg==="), FormatError);
}

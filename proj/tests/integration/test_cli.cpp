#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "procam/image_io.hpp"
#include "procam/masks.hpp"
#include "procam/slcodec.hpp"

namespace fs = std::filesystem;
using namespace procam;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run(const std::string& args) {
  const std::string command = std::string(PROCAM_CLI) + " " + args + " 2>&1";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) result.output.append(buffer.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("procam_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count_png(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ".png" ? 1 : 0;
  return n;
}

}  // namespace

TEST(Cli, PatternsWritesFramesAndManifest) {
  const auto dir = temp_dir("patterns");
  const auto r = run("patterns --proj-size 256x256 --out " + (dir / "p").string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(count_png(dir / "p"), 34U);
  EXPECT_TRUE(fs::exists(dir / "p" / "manifest.json"));
  EXPECT_EQ(sl::read_pattern_dir(dir / "p").frames, sl::generate_patterns(256, 256).frames);
}

TEST(Cli, DecodeFrameCountMismatchExitsTwo) {
  const auto dir = temp_dir("decode_mismatch");
  ASSERT_EQ(run("patterns --proj-size 64x64 --out " + (dir / "p").string()).exit_code, 0);
  const auto r = run("decode --captures " + (dir / "p").string() +
                     " --proj-size 256x256 --out " + (dir / "c.lfcm").string());
  EXPECT_EQ(r.exit_code, 2) << r.output;
  EXPECT_NE(r.output.find("expected 34"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir / "c.lfcm"));
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").exit_code, 1);
  EXPECT_EQ(run("frobnicate").exit_code, 1);
  EXPECT_EQ(run("patterns --proj-size 64x64").exit_code, 1);
  EXPECT_EQ(run("patterns --bogus --proj-size 4x4 --out /tmp/x").exit_code, 1);
}

TEST(Cli, HelpOnEverySubcommand) {
  for (const std::string sub :
       {"", "patterns", "decode", "projimage", "depth", "mask", "mask wand", "mask quick",
        "mask lasso", "effect", "effect render", "shader", "shader render", "sim", "sim capture",
        "sim truth", "sim render", "sim demo", "serve"}) {
    const auto r = run(sub + " --help");
    EXPECT_EQ(r.exit_code, 0) << sub << "\n" << r.output;
    EXPECT_NE(r.output.find("Usage"), std::string::npos) << sub;
  }
}

TEST(Cli, SimulatedScanPipeline) {
  const auto dir = temp_dir("pipeline");
  const auto d = [&](const char* name) { return (dir / name).string(); };
  ASSERT_EQ(run("sim demo --out " + d("demo")).exit_code, 0);
  ASSERT_EQ(run("patterns --proj-size 256x256 --out " + d("pat")).exit_code, 0);
  ASSERT_EQ(run("sim capture --scene " + d("demo/scene.json") + " --patterns " + d("pat") +
                " --out " + d("cap"))
                .exit_code,
            0);
  const auto dec = run("decode --captures " + d("cap") + " --proj-size 256x256 --out " + d("c.lfcm"));
  ASSERT_EQ(dec.exit_code, 0) << dec.output;
  ASSERT_EQ(run("sim render --scene " + d("demo/scene.json") + " --camera-out " + d("cam.png")).exit_code, 0);
  const auto pi = run("projimage --corr " + d("c.lfcm") + " --camera " + d("cam.png") + " --out " +
                      d("proj.png") + " --coverage-out " + d("cov.png"));
  ASSERT_EQ(pi.exit_code, 0) << pi.output;
  EXPECT_EQ(io::read_png_rgb(d("proj.png")).size(), (Size{256, 256}));
  EXPECT_EQ(io::read_png_gray16(d("cov.png")).size(), (Size{256, 256}));

  const auto depth = run("depth --corr " + d("c.lfcm") + " --rig " + d("demo/rig.json") + " --out " + d("d.pfm"));
  ASSERT_EQ(depth.exit_code, 0) << depth.output;
  EXPECT_EQ(io::read_pfm(d("d.pfm")).size(), (Size{320, 240}));

  const auto wand = run("mask wand --image " + d("proj.png") + " --seed 128,128 --out " + d("m.png"));
  ASSERT_EQ(wand.exit_code, 0) << wand.output;
  EXPECT_GT(masks::area(masks::from_gray(io::read_png_gray(d("m.png")))), 0U);
  EXPECT_EQ(run("mask wand --image " + d("proj.png") + " --seed 999,1 --out " + d("m2.png")).exit_code, 1);

  std::ofstream(d("tron.json")) << R"({"kind": "tron"})";
  const auto fx = run("effect render --spec " + d("tron.json") + " --scene " + d("proj.png") +
                      " --t0 0 --t1 0.5 --fps 10 --out " + d("frames"));
  ASSERT_EQ(fx.exit_code, 0) << fx.output;
  EXPECT_EQ(count_png(dir / "frames"), 6U);
}

TEST(Cli, ShaderRenderAndCompileErrors) {
  const auto dir = temp_dir("shader");
  std::ofstream(dir / "ok.glsl") << "void mainImage(out vec4 c, in vec2 p) { c = vec4(1.0, 0.5, 0.0, 1.0); }\n";
  std::ofstream(dir / "bad.glsl") << "void mainImage(out vec4 c, in vec2 p) {\n  c = 1;\n}\n";
  const auto ok = run("shader render --src " + (dir / "ok.glsl").string() + " --size 8x4 --out " +
                      (dir / "ok.png").string());
  ASSERT_EQ(ok.exit_code, 0) << ok.output;
  EXPECT_EQ(io::read_png_rgb(dir / "ok.png").at(3, 2), (Rgb8{255, 128, 0}));

  const auto bad = run("shader render --src " + (dir / "bad.glsl").string() + " --size 8x4 --out " +
                       (dir / "bad.png").string());
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_NE(bad.output.find("bad.glsl:2:"), std::string::npos) << bad.output;
  EXPECT_FALSE(fs::exists(dir / "bad.png"));
}

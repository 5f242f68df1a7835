// procam: every pipeline stage behind one multiplexed command line.
// Exit codes: 0 success, 1 usage error, 2 processing error.

#include <CLI11.hpp>

#include <pthread.h>

#include <array>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "procam/effects.hpp"
#include "procam/geometry.hpp"
#include "procam/image_io.hpp"
#include "procam/masks.hpp"
#include "procam/projimage.hpp"
#include "procam/service.hpp"
#include "procam/shaderlang.hpp"
#include "procam/simulator.hpp"
#include "procam/slcodec.hpp"

namespace fs = std::filesystem;
using namespace procam;

namespace {

// Wrong flag values discovered after parsing still count as usage errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Size size_arg(const std::string& text, const char* flag) {
  try {
    return parse_size(text);
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

PixelCoord point_arg(const std::string& text) {
  int x = 0;
  int y = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> x >> comma >> y) || comma != ',' || !in.eof()) {
    throw UsageError("expected a point as X,Y, got '" + text + "'");
  }
  return {x, y};
}

std::vector<PixelCoord> points_arg(const std::vector<std::string>& texts) {
  std::vector<PixelCoord> points;
  for (const auto& t : texts) {
    points.push_back(point_arg(t));
  }
  return points;
}

std::string read_text(const fs::path& path) {
  const auto bytes = io::read_file(path);
  return {bytes.begin(), bytes.end()};
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) {
    fs::create_directories(file.parent_path());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"procam: structured-light scanning and projection-mapping toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::function<void()> action;

  // patterns
  auto* patterns = app.add_subcommand("patterns", "Write the Gray-code pattern sequence");
  std::string proj_size;
  fs::path out;
  patterns->add_option("--proj-size", proj_size, "Projector resolution WxH")->required();
  patterns->add_option("--out", out, "Output directory")->required();
  patterns->callback([&] {
    action = [&] {
      const Size s = size_arg(proj_size, "--proj-size");
      sl::write_pattern_dir(out, sl::generate_patterns(s.width, s.height));
    };
  });

  // decode
  auto* decode = app.add_subcommand("decode", "Decode captures into a correspondence map");
  fs::path captures_dir;
  double contrast = 0.05;
  decode->add_option("--captures", captures_dir, "Capture directory")->required();
  decode->add_option("--proj-size", proj_size, "Projector resolution WxH")->required();
  decode->add_option("--out", out, "Output .lfcm file")->required();
  decode->add_option("--contrast-threshold", contrast,
                     "Minimum white-black contrast, fraction of full scale")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  decode->callback([&] {
    action = [&] {
      const Size s = size_arg(proj_size, "--proj-size");
      const auto frames = sl::read_capture_dir(captures_dir);
      sl::DecodeOptions options;
      options.contrast_threshold = contrast;
      options.threads = threads;
      const auto corr =
          sl::decode(frames, sl::PatternManifest::for_projector(s.width, s.height), options);
      ensure_parent(out);
      sl::write_lfcm(out, corr);
      std::cout << "valid pixels: " << corr.valid_count() << " (" << corr.valid_fraction() * 100.0
                << "%)\n";
    };
  });

  // projimage
  auto* proj = app.add_subcommand("projimage", "Reconstruct the projector-view image");
  fs::path corr_path;
  fs::path camera_path;
  fs::path coverage_out;
  int fill_radius = 8;
  proj->add_option("--corr", corr_path, "Correspondence map (.lfcm)")->required();
  proj->add_option("--camera", camera_path, "Camera colour image (PNG)")->required();
  proj->add_option("--out", out, "Output PNG")->required();
  proj->add_option("--fill-radius", fill_radius, "Hole-filling passes (0 disables)")
      ->capture_default_str()
      ->check(CLI::Range(0, 1 << 16));
  proj->add_option("--coverage-out", coverage_out, "Optional 16-bit coverage PNG");
  proj->callback([&] {
    action = [&] {
      const auto corr = sl::read_lfcm(corr_path);
      const auto camera = io::read_png_rgb(camera_path);
      auto image = projimage::reconstruct(corr, camera, corr.projector_size(), threads);
      image = projimage::fill_holes(image, fill_radius);
      ensure_parent(out);
      io::write_png(out, image.color);
      if (!coverage_out.empty()) {
        ensure_parent(coverage_out);
        io::write_png(coverage_out, projimage::coverage_image(image));
      }
    };
  });

  // depth
  auto* depth = app.add_subcommand("depth", "Triangulate a depth map");
  fs::path rig_path;
  depth->add_option("--corr", corr_path, "Correspondence map (.lfcm)")->required();
  depth->add_option("--rig", rig_path, "Rig description (rig.json)")->required();
  depth->add_option("--out", out, "Output PFM (NaN = no depth)")->required();
  depth->callback([&] {
    action = [&] {
      const auto rig = geom::read_rig(rig_path);
      const auto corr = sl::read_lfcm(corr_path);
      ensure_parent(out);
      io::write_pfm(out, geom::depth_map(rig, corr));
    };
  });

  // mask
  auto* mask = app.add_subcommand("mask", "Create a mask on a projector image");
  mask->require_subcommand(1);
  fs::path image_path;
  double tolerance = 30.0;
  std::string seed_text;
  int connectivity = 8;
  std::vector<std::string> point_texts;
  auto* wand = mask->add_subcommand("wand", "Magic wand flood fill");
  wand->add_option("--image", image_path, "Projector image (PNG)")->required();
  wand->add_option("--seed", seed_text, "Seed pixel X,Y")->required();
  wand->add_option("--tolerance", tolerance, "RGB distance tolerance (0..441)")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 442.0));
  wand->add_option("--connectivity", connectivity, "4 or 8")
      ->capture_default_str()
      ->check(CLI::IsMember({4, 8}));
  wand->add_option("--out", out, "Output mask PNG (members = 255)")->required();
  wand->callback([&] {
    action = [&] {
      const PixelCoord seed = point_arg(seed_text);
      const auto image = io::read_png_rgb(image_path);
      if (!image.contains(seed)) {
        throw UsageError("--seed is outside the " + format_size(image.size()) + " image");
      }
      const auto m = masks::magic_wand(
          image, seed, tolerance,
          connectivity == 4 ? masks::Connectivity::Four : masks::Connectivity::Eight);
      ensure_parent(out);
      io::write_png(out, masks::to_gray(m));
    };
  });
  auto* quick = mask->add_subcommand("quick", "Quick select region growing");
  quick->add_option("--image", image_path, "Projector image (PNG)")->required();
  quick->add_option("--scribble", point_texts, "Scribble pixels X,Y ...")->required();
  quick->add_option("--tolerance", tolerance, "RGB distance tolerance")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 442.0));
  quick->add_option("--out", out, "Output mask PNG (members = 255)")->required();
  quick->callback([&] {
    action = [&] {
      const auto image = io::read_png_rgb(image_path);
      const auto m = masks::quick_select(image, points_arg(point_texts), tolerance);
      ensure_parent(out);
      io::write_png(out, masks::to_gray(m));
    };
  });
  auto* lasso = mask->add_subcommand("lasso", "Magnetic lasso closed into a region");
  fs::path path_out;
  lasso->add_option("--image", image_path, "Projector image (PNG)")->required();
  lasso->add_option("--anchors", point_texts, "Anchor pixels X,Y ... (at least 2)")->required();
  lasso->add_option("--out", out, "Output mask PNG (members = 255)")->required();
  lasso->add_option("--path-out", path_out, "Optional text file with the traced path");
  lasso->callback([&] {
    action = [&] {
      const auto image = io::read_png_rgb(image_path);
      const auto path = masks::magnetic_lasso(image, points_arg(point_texts));
      ensure_parent(out);
      io::write_png(out, masks::to_gray(masks::path_to_mask(path, image.size())));
      if (!path_out.empty()) {
        ensure_parent(path_out);
        std::ofstream file(path_out);
        for (const auto& p : path) {
          file << p.x << "," << p.y << "\n";
        }
      }
    };
  });

  // effect render
  auto* effect = app.add_subcommand("effect", "Procedural effects");
  effect->require_subcommand(1);
  auto* effect_render = effect->add_subcommand("render", "Render an effect frame sequence");
  fs::path spec_path;
  fs::path scene_path;
  fs::path mask_path;
  double t0 = 0.0;
  double t1 = 0.0;
  double fps = 30.0;
  effect_render->add_option("--spec", spec_path, "Effect spec (JSON)")->required();
  effect_render->add_option("--scene", scene_path, "Projector image (PNG)")->required();
  effect_render->add_option("--mask", mask_path, "Mask PNG for specs that reference a mask");
  effect_render->add_option("--t0", t0, "First frame time, seconds")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  effect_render->add_option("--t1", t1, "Last frame time, seconds (inclusive)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  effect_render->add_option("--fps", fps, "Frames per second")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  effect_render->add_option("--out", out, "Output directory (frame_NNNNN.png)")->required();
  effect_render->callback([&] {
    action = [&] {
      if (t1 < t0) {
        throw UsageError("--t1 must not precede --t0");
      }
      auto spec = fx::parse_effect_spec(read_text(spec_path));
      std::optional<masks::Mask> m;
      if (!mask_path.empty()) {
        m = masks::from_gray(io::read_png_gray(mask_path));
        if (!spec.mask) {
          spec.mask = mask_path.stem().string();
        }
      }
      const fx::PreparedEffect prepared(spec, io::read_png_rgb(scene_path), m);
      fs::create_directories(out);
      const auto count = static_cast<long>(std::floor((t1 - t0) * fps + 1e-9)) + 1;
      for (long k = 0; k < count; ++k) {
        const double t = t0 + static_cast<double>(k) / fps;
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05ld.png", k);
        io::write_png(out / name, prepared.render(t));
      }
      std::cout << "wrote " << count << " frames\n";
    };
  });

  // shader render
  auto* shader_cmd = app.add_subcommand("shader", "Shadertoy-style shader interpreter");
  shader_cmd->require_subcommand(1);
  auto* shader_render = shader_cmd->add_subcommand("render", "Render one shader frame");
  fs::path src_path;
  std::string size_text;
  double t = 0.0;
  int frame = 0;
  std::string wrap = "repeat";
  std::array<fs::path, 4> channel_paths;
  shader_render->add_option("--src", src_path, "Shader source (GLSL)")->required();
  shader_render->add_option("--size", size_text, "Output resolution WxH")->required();
  shader_render->add_option("--t", t, "iTime, seconds")->capture_default_str();
  shader_render->add_option("--frame", frame, "iFrame")->capture_default_str();
  for (int k = 0; k < 4; ++k) {
    shader_render->add_option("--channel" + std::to_string(k), channel_paths[k],
                              "Image bound to iChannel" + std::to_string(k));
  }
  shader_render->add_option("--wrap", wrap, "Channel sampling: repeat or clamp")
      ->capture_default_str()
      ->check(CLI::IsMember({"repeat", "clamp"}));
  shader_render->add_option("--out", out, "Output PNG")->required();
  shader_render->callback([&] {
    action = [&] {
      const Size s = size_arg(size_text, "--size");
      const auto source = read_text(src_path);
      const auto result = shader::compile(source);
      if (!result.ok()) {
        for (const auto& d : result.diagnostics) {
          std::cerr << src_path.string() << ":" << d.to_string() << "\n";
        }
        throw Error(src_path.string() + " failed to compile");
      }
      shader::Uniforms uniforms;
      uniforms.time = t;
      uniforms.frame = frame;
      for (int k = 0; k < 4; ++k) {
        if (!channel_paths[k].empty()) {
          uniforms.channels[k] = shader::Channel{
              std::make_shared<const RgbImage>(io::read_png_rgb(channel_paths[k])),
              wrap == "clamp" ? shader::ChannelWrap::Clamp : shader::ChannelWrap::Repeat};
        }
      }
      shader::RenderOptions options;
      options.threads = threads;
      const auto image = shader::render_frame(*result.program, uniforms, s, options);
      ensure_parent(out);
      io::write_png(out, image);
    };
  });

  // sim
  auto* sim_cmd = app.add_subcommand("sim", "Virtual projector-camera rig");
  sim_cmd->require_subcommand(1);
  fs::path scene_json;
  fs::path patterns_dir;
  auto* sim_capture = sim_cmd->add_subcommand("capture", "Render camera captures of patterns");
  sim_capture->add_option("--scene", scene_json, "Scene description (scene.json)")->required();
  sim_capture->add_option("--patterns", patterns_dir, "Pattern directory")->required();
  sim_capture->add_option("--out", out, "Output capture directory")->required();
  sim_capture->callback([&] {
    action = [&] {
      const auto scene = sim::read_scene(scene_json);
      const auto set = sl::read_pattern_dir(patterns_dir);
      const auto frames = sim::simulate_captures(scene, set.frames, threads);
      sl::write_frame_dir(out, "capture", set.manifest, frames);
    };
  });
  auto* sim_truth = sim_cmd->add_subcommand("truth", "Exact correspondence map of a scene");
  sim_truth->add_option("--scene", scene_json, "Scene description (scene.json)")->required();
  sim_truth->add_option("--out", out, "Output .lfcm file")->required();
  sim_truth->callback([&] {
    action = [&] {
      const auto corr = sim::ground_truth(sim::read_scene(scene_json));
      ensure_parent(out);
      sl::write_lfcm(out, corr);
    };
  });
  auto* sim_render = sim_cmd->add_subcommand("render", "Noiseless albedo views of a scene");
  fs::path camera_out;
  fs::path projector_out;
  sim_render->add_option("--scene", scene_json, "Scene description (scene.json)")->required();
  sim_render->add_option("--camera-out", camera_out, "Camera view under white light (PNG)");
  sim_render->add_option("--projector-out", projector_out, "Projector-viewpoint render (PNG)");
  sim_render->callback([&] {
    action = [&] {
      if (camera_out.empty() && projector_out.empty()) {
        throw UsageError("give --camera-out and/or --projector-out");
      }
      const auto scene = sim::read_scene(scene_json);
      if (!camera_out.empty()) {
        ensure_parent(camera_out);
        io::write_png(camera_out, sim::render_camera_albedo(scene));
      }
      if (!projector_out.empty()) {
        ensure_parent(projector_out);
        io::write_png(projector_out, sim::render_projector_albedo(scene));
      }
    };
  });
  auto* sim_demo = sim_cmd->add_subcommand("demo", "Write the built-in demo scene and its rig");
  sim_demo->add_option("--out", out, "Output directory (scene.json, rig.json)")->required();
  sim_demo->callback([&] {
    action = [&] {
      fs::create_directories(out);
      const std::string scene = sim::demo_scene_json();
      const std::string rig = geom::rig_to_json(sim::demo_scene().rig);
      io::write_file(out / "scene.json",
                     std::span(reinterpret_cast<const std::uint8_t*>(scene.data()), scene.size()));
      io::write_file(out / "rig.json",
                     std::span(reinterpret_cast<const std::uint8_t*>(rig.data()), rig.size()));
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP authoring service");
  int port = 8080;
  std::string host = "127.0.0.1";
  fs::path data_dir;
  fs::path static_dir;
  serve->add_option("--port", port, "TCP port (0 = any free port)")
      ->capture_default_str()
      ->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Session persistence directory");
  serve->add_option("--static-dir", static_dir, "Directory served at / (UI build)");
  serve->callback([&] {
    action = [&] {
      // SIGINT/SIGTERM are taken synchronously by a watcher thread.
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);
      service::ServiceOptions service_options;
      service_options.data_dir = data_dir;
      service_options.render_threads = threads;
      service::Service svc(service_options);
      service::HttpServer server(svc, {host, port, static_dir});
      const int bound = server.bind();
      std::cout << "listening on http://" << host << ":" << bound << std::endl;
      std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
      });
      watcher.detach();
      server.run();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

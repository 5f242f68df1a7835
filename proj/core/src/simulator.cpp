#include "procam/simulator.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "json_support.hpp"
#include "procam/image_io.hpp"
#include "procam/parallel.hpp"

namespace procam::sim {
namespace {

using nlohmann::json;

constexpr double kRayEpsilon = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Standard normal sample for one (seed, frame, pixel) key via Box-Muller.
double gaussian(std::uint64_t seed, std::uint64_t frame, std::uint64_t pixel) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(frame ^ splitmix64(pixel)));
  const std::uint64_t a = splitmix64(key);
  const std::uint64_t b = splitmix64(key + 1);
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double luma(const Eigen::Vector3d& rgb) {
  return 0.299 * rgb.x() + 0.587 * rgb.y() + 0.114 * rgb.z();
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Ray/parallelogram intersection; nullopt when missing, back-facing or behind.
std::optional<SurfaceHit> intersect(const Plane& plane, int index, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction) {
  const Eigen::Vector3d n = plane.edge_v.cross(plane.edge_u);
  const double denom = n.dot(direction);
  if (!(denom < 0.0)) {
    return std::nullopt;
  }
  const double lambda = n.dot(plane.corner - origin) / denom;
  if (!(lambda > kRayEpsilon)) {
    return std::nullopt;
  }
  const Eigen::Vector3d point = origin + lambda * direction;
  const Eigen::Vector3d rel = point - plane.corner;
  const double uu = plane.edge_u.dot(plane.edge_u);
  const double uv = plane.edge_u.dot(plane.edge_v);
  const double vv = plane.edge_v.dot(plane.edge_v);
  const double pu = rel.dot(plane.edge_u);
  const double pv = rel.dot(plane.edge_v);
  const double det = uu * vv - uv * uv;
  const double s = (pu * vv - pv * uv) / det;
  const double t = (pv * uu - pu * uv) / det;
  if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0) {
    return std::nullopt;
  }
  return SurfaceHit{index, point, lambda, s, t};
}

// --- Textures ------------------------------------------------------------

Rgb8 read_rgb(const json& value) {
  const auto c = value.get<std::vector<int>>();
  if (c.size() != 3) {
    throw FormatError("colours need 3 channels");
  }
  for (int v : c) {
    if (v < 0 || v > 255) {
      throw FormatError("colour channels must be in 0..255");
    }
  }
  return {static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
          static_cast<std::uint8_t>(c[2])};
}

Size read_texture_size(const json& doc, Size fallback) {
  if (!doc.contains("size")) {
    return fallback;
  }
  const auto s = doc.at("size").get<std::vector<int>>();
  if (s.size() != 2 || s[0] < 1 || s[1] < 1 || s[0] > 8192 || s[1] > 8192) {
    throw FormatError("texture size must be [w, h] within 1..8192");
  }
  return {s[0], s[1]};
}

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Flat-coloured shapes with soft rims on a flat background. The soft rims
// keep resampling error low; the flat interiors suit region selection.
RgbImage demo_texture(Size size) {
  RgbImage image(size);
  const double w = size.width;
  const double h = size.height;
  const double rim = std::max(2.0, w / 96.0);
  const Eigen::Vector3d background(214, 208, 192);
  const Eigen::Vector3d red(200, 70, 60);
  const Eigen::Vector3d blue(70, 110, 205);
  const Eigen::Vector3d green(90, 170, 90);
  const Eigen::Vector3d yellow(230, 200, 80);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const double px = x + 0.5;
      const double py = y + 0.5;
      Eigen::Vector3d c = background;
      const auto paint = [&](double coverage, const Eigen::Vector3d& colour) {
        c = c * (1.0 - coverage) + colour * coverage;
      };
      // Rectangle, upper left.
      const double rect = std::min({px - 0.10 * w, 0.42 * w - px, py - 0.12 * h, 0.45 * h - py});
      paint(smoothstep(-rim, rim, rect), red);
      // Disc, right.
      const double disc = 0.17 * h - std::hypot(px - 0.70 * w, py - 0.35 * h);
      paint(smoothstep(-rim, rim, disc), blue);
      // Horizontal band, lower third.
      const double band = std::min({py - 0.62 * h, 0.80 * h - py, px - 0.15 * w, 0.60 * w - px});
      paint(smoothstep(-rim, rim, band), green);
      // Small square, lower right.
      const double square =
          std::min({px - 0.70 * w, 0.85 * w - px, py - 0.65 * h, 0.85 * h - py});
      paint(smoothstep(-rim, rim, square), yellow);
      image.at(x, y) = Rgb8{to_byte(c.x()), to_byte(c.y()), to_byte(c.z())};
    }
  }
  return image;
}

RgbImage procedural_texture(const json& doc) {
  const auto kind = detail::json_get<std::string>(doc, "kind");
  if (kind == "solid") {
    const Size size = read_texture_size(doc, {4, 4});
    return RgbImage(size, read_rgb(doc.at("color")));
  }
  if (kind == "checker") {
    const Size size = read_texture_size(doc, {256, 256});
    const int cells = doc.value("cells", 8);
    if (cells < 1 || cells > std::min(size.width, size.height)) {
      throw FormatError("checker cells must be in 1..min(w, h)");
    }
    Rgb8 a{230, 230, 230};
    Rgb8 b{60, 60, 60};
    if (doc.contains("colors")) {
      const auto& colors = doc.at("colors");
      if (!colors.is_array() || colors.size() != 2) {
        throw FormatError("checker colors must hold two colours");
      }
      a = read_rgb(colors[0]);
      b = read_rgb(colors[1]);
    }
    RgbImage image(size);
    for (int y = 0; y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) {
        const int cx = x * cells / size.width;
        const int cy = y * cells / size.height;
        image.at(x, y) = ((cx + cy) % 2 == 0) ? a : b;
      }
    }
    return image;
  }
  if (kind == "demo") {
    return demo_texture(read_texture_size(doc, {512, 384}));
  }
  throw FormatError("unknown texture kind '" + kind + "'");
}

Eigen::Vector3d read_vec3(const std::vector<double>& v, std::size_t offset) {
  return {v[offset], v[offset + 1], v[offset + 2]};
}

}  // namespace

Eigen::Vector3d Plane::front_normal() const { return edge_v.cross(edge_u).normalized(); }

Eigen::Vector3d Plane::albedo(double s, double t) const {
  const double x = std::clamp(s * texture.width() - 0.5, 0.0, texture.width() - 1.0);
  const double y = std::clamp(t * texture.height() - 0.5, 0.0, texture.height() - 1.0);
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, texture.width() - 1);
  const int y1 = std::min(y0 + 1, texture.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const auto px = [&](int xi, int yi) {
    const Rgb8 c = texture.at(xi, yi);
    return Eigen::Vector3d(c.r, c.g, c.b);
  };
  const Eigen::Vector3d top = px(x0, y0) * (1.0 - fx) + px(x1, y0) * fx;
  const Eigen::Vector3d bottom = px(x0, y1) * (1.0 - fx) + px(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

void SceneModel::validate() const {
  rig.validate();
  if (planes.empty()) {
    throw InvalidArgument("scene has no planes");
  }
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const auto& p = planes[i];
    const double area = p.edge_u.cross(p.edge_v).norm();
    if (!std::isfinite(area) || !(area > 1e-12) || !p.corner.allFinite()) {
      throw InvalidArgument("plane " + std::to_string(i) + " is degenerate (parallel edges)");
    }
    if (p.texture.empty()) {
      throw InvalidArgument("plane " + std::to_string(i) + " has no texture");
    }
  }
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(ambient) || !unit(projector_gain)) {
    throw InvalidArgument("ambient and projector_gain must be in [0, 1]");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("noise_sigma must be finite and >= 0");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("gamma must be > 0");
  }
}

std::optional<SurfaceHit> trace_ray(const SceneModel& scene, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction) {
  std::optional<SurfaceHit> best;
  for (std::size_t i = 0; i < scene.planes.size(); ++i) {
    auto hit = intersect(scene.planes[i], static_cast<int>(i), origin, direction);
    if (hit && (!best || hit->distance < best->distance)) {
      best = hit;
    }
  }
  return best;
}

std::optional<SurfaceHit> camera_hit(const SceneModel& scene, double u, double v) {
  return trace_ray(scene, Eigen::Vector3d::Zero(), scene.rig.camera.ray(u, v));
}

std::optional<Eigen::Vector2d> projector_lookup(const SceneModel& scene, const SurfaceHit& hit) {
  const Eigen::Vector3d center = scene.rig.projector_center();
  const Eigen::Vector3d beam = hit.point - center;
  const auto& plane = scene.planes[static_cast<std::size_t>(hit.plane)];
  if (!(plane.edge_v.cross(plane.edge_u).dot(beam) < 0.0)) {
    return std::nullopt;  // faces away from the projector
  }
  const auto pixel = scene.rig.projector.project(scene.rig.to_projector(hit.point));
  if (!pixel || !scene.rig.projector.contains(pixel->x(), pixel->y())) {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < scene.planes.size(); ++i) {
    if (static_cast<int>(i) == hit.plane) {
      continue;
    }
    const auto blocker = intersect(scene.planes[i], static_cast<int>(i), center, beam);
    if (blocker && blocker->distance < 1.0 - 1e-9) {
      return std::nullopt;
    }
  }
  return pixel;
}

GrayImage simulate_capture(const SceneModel& scene, const GrayImage& pattern,
                           std::uint64_t frame_index, unsigned threads) {
  scene.validate();
  if (pattern.size() != scene.rig.projector.size()) {
    throw DimensionMismatch("pattern is " + format_size(pattern.size()) +
                            " but the projector is " + format_size(scene.rig.projector.size()));
  }
  const auto& camera = scene.rig.camera;
  GrayImage out(camera.size());
  parallel_for_rows(camera.height, threads, [&](int begin, int end) {
    for (int y = begin; y < end; ++y) {
      for (int x = 0; x < camera.width; ++x) {
        double lum = 0.0;
        if (const auto hit = camera_hit(scene, x, y)) {
          const auto& plane = scene.planes[static_cast<std::size_t>(hit->plane)];
          const double albedo = luma(plane.albedo(hit->s, hit->t)) / 255.0;
          double light = scene.ambient;
          if (const auto proj = projector_lookup(scene, *hit)) {
            const int px = static_cast<int>(std::lround(proj->x()));
            const int py = static_cast<int>(std::lround(proj->y()));
            const double sample = pattern.at(px, py) / 255.0;
            light += scene.projector_gain * std::pow(sample, scene.gamma);
          }
          lum = albedo * std::clamp(light, 0.0, 1.0);
        }
        if (scene.noise_sigma > 0.0) {
          const auto pixel = static_cast<std::uint64_t>(out.index(x, y));
          lum += scene.noise_sigma * gaussian(scene.seed, frame_index, pixel);
        }
        out.at(x, y) = to_byte(std::clamp(lum, 0.0, 1.0) * 255.0);
      }
    }
  });
  return out;
}

std::vector<GrayImage> simulate_captures(const SceneModel& scene,
                                         std::span<const GrayImage> patterns, unsigned threads) {
  std::vector<GrayImage> frames;
  frames.reserve(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    frames.push_back(simulate_capture(scene, patterns[i], i, threads));
  }
  return frames;
}

sl::CorrespondenceMap ground_truth(const SceneModel& scene) {
  scene.validate();
  const auto& camera = scene.rig.camera;
  const auto& projector = scene.rig.projector;
  sl::CorrespondenceMap map(camera.size(), projector.size());
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const auto hit = camera_hit(scene, x, y);
      if (!hit) {
        continue;
      }
      const auto proj = projector_lookup(scene, *hit);
      if (!proj) {
        continue;
      }
      const auto px = static_cast<float>(proj->x());
      const auto py = static_cast<float>(proj->y());
      // The map stores coordinates in [0, w) x [0, h).
      if (!(px >= 0.0F && py >= 0.0F && px < static_cast<float>(projector.width) &&
            py < static_cast<float>(projector.height))) {
        continue;
      }
      map.at(x, y) = sl::Correspondence{px, py, 1.0F, true};
    }
  }
  return map;
}

RgbImage render_camera_albedo(const SceneModel& scene) {
  scene.validate();
  const auto& camera = scene.rig.camera;
  RgbImage out(camera.size());
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      if (const auto hit = camera_hit(scene, x, y)) {
        const auto c = scene.planes[static_cast<std::size_t>(hit->plane)].albedo(hit->s, hit->t);
        out.at(x, y) = Rgb8{to_byte(c.x()), to_byte(c.y()), to_byte(c.z())};
      }
    }
  }
  return out;
}

RgbImage render_projector_albedo(const SceneModel& scene) {
  scene.validate();
  const auto& projector = scene.rig.projector;
  const Eigen::Vector3d center = scene.rig.projector_center();
  const Eigen::Matrix3d to_camera = scene.rig.rotation.transpose();
  RgbImage out(projector.size());
  for (int y = 0; y < projector.height; ++y) {
    for (int x = 0; x < projector.width; ++x) {
      const Eigen::Vector3d direction = to_camera * projector.ray(x, y);
      if (const auto hit = trace_ray(scene, center, direction)) {
        const auto c = scene.planes[static_cast<std::size_t>(hit->plane)].albedo(hit->s, hit->t);
        out.at(x, y) = Rgb8{to_byte(c.x()), to_byte(c.y()), to_byte(c.z())};
      }
    }
  }
  return out;
}

SceneModel parse_scene(std::string_view json_text, const std::filesystem::path& base_dir) {
  try {
    const auto doc = json::parse(json_text);
    if (!doc.is_object()) {
      throw FormatError("scene must be a JSON object");
    }
    SceneModel scene;
    scene.rig = detail::rig_from_json(doc.at("rig"));
    scene.ambient = doc.value("ambient", scene.ambient);
    scene.projector_gain = doc.value("projector_gain", scene.projector_gain);
    scene.noise_sigma = doc.value("noise_sigma", scene.noise_sigma);
    scene.gamma = doc.value("gamma", scene.gamma);
    if (doc.contains("seed")) {
      scene.seed = static_cast<std::uint64_t>(doc.at("seed").get<std::int64_t>());
    }
    const auto& planes = doc.at("planes");
    if (!planes.is_array()) {
      throw FormatError("planes must be an array");
    }
    for (const auto& entry : planes) {
      const auto points = detail::json_get<std::vector<double>>(entry, "points");
      if (points.size() != 9) {
        throw FormatError("each plane needs 9 numbers: corner, edge_u, edge_v");
      }
      Plane plane;
      plane.corner = read_vec3(points, 0);
      plane.edge_u = read_vec3(points, 3);
      plane.edge_v = read_vec3(points, 6);
      const auto& texture = entry.at("texture");
      if (texture.is_string()) {
        plane.texture = io::read_png_rgb(base_dir / texture.get<std::string>());
      } else if (texture.is_object()) {
        plane.texture = procedural_texture(texture);
      } else {
        throw FormatError("texture must be a file path or a procedural texture object");
      }
      scene.planes.push_back(std::move(plane));
    }
    scene.validate();
    return scene;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed scene JSON: ") + e.what());
  }
}

SceneModel read_scene(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return parse_scene(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

std::string demo_scene_json() {
  geom::StereoRig rig;
  rig.camera = geom::PinholeModel{400.0, 400.0, 159.5, 119.5, 320, 240};
  rig.projector = geom::PinholeModel{300.0, 300.0, 127.5, 127.5, 256, 256};
  // Projector 0.25 m to the right of the camera, verged on the point 1 m ahead.
  const Eigen::Vector3d center(0.25, 0.0, 0.0);
  const Eigen::Vector3d z_axis = (Eigen::Vector3d(0.0, 0.0, 1.0) - center).normalized();
  const Eigen::Vector3d y_axis = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d x_axis = y_axis.cross(z_axis).normalized();
  Eigen::Matrix3d rotation;
  rotation.row(0) = x_axis.transpose();
  rotation.row(1) = z_axis.cross(x_axis).transpose();
  rotation.row(2) = z_axis.transpose();
  rig.rotation = rotation;
  rig.translation = -(rotation * center);

  // 1.0 m x 0.75 m plane centred 1 m ahead, turned 20 degrees about y and
  // 10 degrees about x.
  const Eigen::Matrix3d tilt =
      (Eigen::AngleAxisd(20.0 * std::numbers::pi / 180.0, Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(10.0 * std::numbers::pi / 180.0, Eigen::Vector3d::UnitX()))
          .toRotationMatrix();
  const Eigen::Vector3d edge_u = tilt * Eigen::Vector3d(1.0, 0.0, 0.0);
  const Eigen::Vector3d edge_v = tilt * Eigen::Vector3d(0.0, 0.75, 0.0);
  const Eigen::Vector3d corner = Eigen::Vector3d(0.0, 0.0, 1.0) - 0.5 * edge_u - 0.5 * edge_v;

  std::vector<double> points;
  for (const auto* v : {&corner, &edge_u, &edge_v}) {
    points.insert(points.end(), {v->x(), v->y(), v->z()});
  }
  const json doc{
      {"rig", detail::rig_to_json_value(rig)},
      {"planes", json::array({json{{"points", points},
                                   {"texture", {{"kind", "demo"}, {"size", {512, 384}}}}}})},
      {"ambient", 0.1},
      {"projector_gain", 0.9},
      {"noise_sigma", 1.0 / 255.0},
      {"gamma", 1.0},
      {"seed", 7}};
  return doc.dump(2);
}

SceneModel demo_scene() { return parse_scene(demo_scene_json()); }

}  // namespace procam::sim

#pragma once

// Virtual projector-camera rig over textured planes. Everything is expressed
// in the camera frame (x right, y down, z forward, metres).

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "procam/geometry.hpp"
#include "procam/image.hpp"
#include "procam/slcodec.hpp"

namespace procam::sim {

/// Parallelogram corner + s * edge_u + t * edge_v, s, t in [0, 1], carrying an
/// albedo texture whose top-left texel sits at the corner, columns running
/// along edge_u and rows along edge_v.
///
/// Planes are one-sided: the front face is the one from which the texture
/// reads unmirrored, with normal edge_v x edge_u. Rays reaching the back face
/// pass through.
struct Plane {
  Eigen::Vector3d corner = Eigen::Vector3d::Zero();
  Eigen::Vector3d edge_u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d edge_v = Eigen::Vector3d::UnitY();
  RgbImage texture;

  Eigen::Vector3d front_normal() const;
  /// Bilinear albedo at plane-local (s, t), clamped at the texture border,
  /// in 0..255 per channel.
  Eigen::Vector3d albedo(double s, double t) const;
};

struct SceneModel {
  geom::StereoRig rig;
  std::vector<Plane> planes;
  double ambient = 0.1;         // [0, 1]
  double projector_gain = 1.0;  // [0, 1]
  double noise_sigma = 0.0;     // standard deviation, fraction of full scale
  double gamma = 1.0;           // projector response exponent
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on no planes, degenerate planes, empty textures
  /// or out-of-range radiometry.
  void validate() const;
};

struct SurfaceHit {
  int plane = -1;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  double distance = 0.0;  // along the (unnormalised) ray direction
  double s = 0.0;
  double t = 0.0;
};

/// Nearest front-facing plane hit with positive ray parameter.
std::optional<SurfaceHit> trace_ray(const SceneModel& scene, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction);

/// First surface seen through camera pixel (u, v).
std::optional<SurfaceHit> camera_hit(const SceneModel& scene, double u, double v);

/// Projector pixel coordinates of a surface point when the projector lights
/// it: the point faces the projector, lies inside its image and no nearer
/// surface blocks the beam.
std::optional<Eigen::Vector2d> projector_lookup(const SceneModel& scene, const SurfaceHit& hit);

/// One camera frame of the scene lit by `pattern`. Noise is keyed on
/// (seed, frame_index, pixel) so thread count never changes the result.
GrayImage simulate_capture(const SceneModel& scene, const GrayImage& pattern,
                           std::uint64_t frame_index = 0, unsigned threads = 0);

/// simulate_capture for every pattern, frame_index = position in the list.
std::vector<GrayImage> simulate_captures(const SceneModel& scene,
                                         std::span<const GrayImage> patterns,
                                         unsigned threads = 0);

/// Exact real-valued camera -> projector mapping. Valid where the surface is
/// seen by the camera, lit by the projector and maps into [0, w) x [0, h).
sl::CorrespondenceMap ground_truth(const SceneModel& scene);

/// Albedo as seen by the camera under flat white light (noiseless RGB).
RgbImage render_camera_albedo(const SceneModel& scene);

/// Albedo as seen from the projector's viewpoint: the direct render that
/// projector-image reconstruction approximates. Black where no surface.
RgbImage render_projector_albedo(const SceneModel& scene);

/// scene.json. Texture paths resolve against `base_dir`; textures may also
/// be procedural objects ({"kind": "solid" | "checker" | "demo", ...}).
SceneModel parse_scene(std::string_view json_text, const std::filesystem::path& base_dir = {});
SceneModel read_scene(const std::filesystem::path& path);

/// Built-in desk fixture: one tilted textured plane about 1 m away, camera
/// 320x240, projector 256x256 on a 0.25 m verged baseline, noise 1/255.
std::string demo_scene_json();
SceneModel demo_scene();

}  // namespace procam::sim

#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "procam/image.hpp"
#include "procam/slcodec.hpp"

namespace procam::geom {

/// Distortion-free pinhole intrinsics. Pixel centres sit at integer
/// coordinates: pixel i covers [i - 0.5, i + 0.5).
struct PinholeModel {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
  Size size() const { return {width, height}; }
  bool contains(double u, double v) const;

  /// Direction (x, y, 1) of the ray through pixel (u, v) in the device frame.
  Eigen::Vector3d ray(double u, double v) const;
  /// Projects a device-frame point; nullopt when it is not in front (z <= 0).
  std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& point) const;
};

/// Camera + projector. The pose maps camera-frame points into the projector
/// frame: p_proj = rotation * p_cam + translation (metres).
struct StereoRig {
  PinholeModel camera;
  PinholeModel projector;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate() const;
  Eigen::Vector3d to_projector(const Eigen::Vector3d& camera_point) const;
  Eigen::Vector3d to_camera(const Eigen::Vector3d& projector_point) const;
  /// Projector centre expressed in the camera frame.
  Eigen::Vector3d projector_center() const;
  /// The same physical rig with the two devices' roles exchanged.
  StereoRig swapped() const;
};

enum class Axis { X, Y };

/// proj - camera coordinate along `axis` at valid pixels, NaN elsewhere.
FloatImage disparity_map(const sl::CorrespondenceMap& corr, Axis axis);

/// Midpoint of the shortest segment between the camera ray through
/// `camera_pixel` and the projector ray through `projector_pixel`, in the
/// camera frame. Throws DegenerateGeometry when the rays are within 1e-6 rad
/// of parallel and InvalidArgument when a pixel is outside its device.
Eigen::Vector3d triangulate(const StereoRig& rig, const Eigen::Vector2d& camera_pixel,
                            const Eigen::Vector2d& projector_pixel);

/// Camera-z depth in metres per camera pixel, NaN where invalid or degenerate.
FloatImage depth_map(const StereoRig& rig, const sl::CorrespondenceMap& corr);

StereoRig parse_rig(std::string_view json_text);
std::string rig_to_json(const StereoRig& rig);
StereoRig read_rig(const std::filesystem::path& path);

}  // namespace procam::geom

#include "procam/geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <limits>

#include "json_support.hpp"
#include "procam/image_io.hpp"

namespace procam::geom {
namespace {

constexpr double kParallelAngle = 1e-6;  // radians
constexpr double kOrthonormalTolerance = 1e-9;
constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

}  // namespace

void PinholeModel::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) {
    throw InvalidArgument("pinhole focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("pinhole image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw InvalidArgument("principal point must lie inside the image");
  }
}

bool PinholeModel::contains(double u, double v) const {
  return u >= -0.5 && v >= -0.5 && u < width - 0.5 && v < height - 0.5;
}

Eigen::Vector3d PinholeModel::ray(double u, double v) const {
  return {(u - cx) / fx, (v - cy) / fy, 1.0};
}

std::optional<Eigen::Vector2d> PinholeModel::project(const Eigen::Vector3d& point) const {
  if (!(point.z() > 0.0)) {
    return std::nullopt;
  }
  return Eigen::Vector2d(fx * point.x() / point.z() + cx, fy * point.y() / point.z() + cy);
}

void StereoRig::validate() const {
  camera.validate();
  projector.validate();
  if (!(rotation.transpose() * rotation).isIdentity(kOrthonormalTolerance)) {
    throw InvalidArgument("rig rotation is not orthonormal");
  }
  if (!(translation.norm() > 0.0)) {
    throw InvalidArgument("rig baseline must be non-zero");
  }
}

Eigen::Vector3d StereoRig::to_projector(const Eigen::Vector3d& camera_point) const {
  return rotation * camera_point + translation;
}

Eigen::Vector3d StereoRig::to_camera(const Eigen::Vector3d& projector_point) const {
  return rotation.transpose() * (projector_point - translation);
}

Eigen::Vector3d StereoRig::projector_center() const {
  return -(rotation.transpose() * translation);
}

StereoRig StereoRig::swapped() const {
  return {projector, camera, rotation.transpose(), -(rotation.transpose() * translation)};
}

FloatImage disparity_map(const sl::CorrespondenceMap& corr, Axis axis) {
  const Size size = corr.camera_size();
  FloatImage out(size.width, size.height, kNaN);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const auto& c = corr.at(x, y);
      if (c.valid) {
        out.at(x, y) = axis == Axis::X ? c.proj_x - static_cast<float>(x)
                                       : c.proj_y - static_cast<float>(y);
      }
    }
  }
  return out;
}

Eigen::Vector3d triangulate(const StereoRig& rig, const Eigen::Vector2d& camera_pixel,
                            const Eigen::Vector2d& projector_pixel) {
  if (!rig.camera.contains(camera_pixel.x(), camera_pixel.y()) ||
      !rig.projector.contains(projector_pixel.x(), projector_pixel.y())) {
    throw InvalidArgument("triangulation pixel outside its device");
  }
  const Eigen::Vector3d origin_cam = Eigen::Vector3d::Zero();
  const Eigen::Vector3d dir_cam = rig.camera.ray(camera_pixel.x(), camera_pixel.y());
  const Eigen::Vector3d origin_proj = rig.projector_center();
  const Eigen::Vector3d dir_proj =
      rig.rotation.transpose() * rig.projector.ray(projector_pixel.x(), projector_pixel.y());

  const double angle = std::atan2(dir_cam.cross(dir_proj).norm(), dir_cam.dot(dir_proj));
  if (std::abs(angle) < kParallelAngle) {
    throw DegenerateGeometry("camera and projector rays are parallel");
  }

  // Closest points o1 + s d1 and o2 + t d2 on the two rays.
  const Eigen::Vector3d w0 = origin_cam - origin_proj;
  const double a = dir_cam.dot(dir_cam);
  const double b = dir_cam.dot(dir_proj);
  const double c = dir_proj.dot(dir_proj);
  const double d = dir_cam.dot(w0);
  const double e = dir_proj.dot(w0);
  const double denom = a * c - b * b;
  const double s = (b * e - c * d) / denom;
  const double t = (a * e - b * d) / denom;
  const Eigen::Vector3d on_cam = origin_cam + s * dir_cam;
  const Eigen::Vector3d on_proj = origin_proj + t * dir_proj;
  return 0.5 * (on_cam + on_proj);
}

FloatImage depth_map(const StereoRig& rig, const sl::CorrespondenceMap& corr) {
  if (corr.camera_size() != rig.camera.size() || corr.projector_size() != rig.projector.size()) {
    throw DimensionMismatch("correspondence map is " + format_size(corr.camera_size()) + " -> " +
                            format_size(corr.projector_size()) + " but rig is " +
                            format_size(rig.camera.size()) + " -> " +
                            format_size(rig.projector.size()));
  }
  const Size size = corr.camera_size();
  FloatImage depth(size.width, size.height, kNaN);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const auto& c = corr.at(x, y);
      if (!c.valid) {
        continue;
      }
      try {
        const auto point = triangulate(rig, {x, y}, {c.proj_x, c.proj_y});
        if (std::isfinite(point.z()) && point.z() > 0.0) {
          depth.at(x, y) = static_cast<float>(point.z());
        }
      } catch (const DegenerateGeometry&) {
      }
    }
  }
  return depth;
}

StereoRig parse_rig(std::string_view json_text) {
  try {
    return detail::rig_from_json(nlohmann::json::parse(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed rig JSON: ") + e.what());
  }
}

std::string rig_to_json(const StereoRig& rig) { return detail::rig_to_json_value(rig).dump(2); }

StereoRig read_rig(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return parse_rig(std::string(bytes.begin(), bytes.end()));
}

}  // namespace procam::geom

namespace procam::detail {
namespace {

geom::PinholeModel pinhole_from_json(const nlohmann::json& doc) {
  geom::PinholeModel model{json_get<double>(doc, "fx"), json_get<double>(doc, "fy"),
                           json_get<double>(doc, "cx"), json_get<double>(doc, "cy"),
                           json_get<int>(doc, "width"),  json_get<int>(doc, "height")};
  model.validate();
  return model;
}

nlohmann::json pinhole_to_json(const geom::PinholeModel& m) {
  return {{"fx", m.fx}, {"fy", m.fy},          {"cx", m.cx},
          {"cy", m.cy}, {"width", m.width}, {"height", m.height}};
}

}  // namespace

geom::StereoRig rig_from_json(const nlohmann::json& doc) {
  geom::StereoRig rig;
  rig.camera = pinhole_from_json(doc.at("camera"));
  rig.projector = pinhole_from_json(doc.at("projector"));
  const auto rotation = json_get<std::vector<double>>(doc, "rotation");
  const auto translation = json_get<std::vector<double>>(doc, "translation");
  if (rotation.size() != 9 || translation.size() != 3) {
    throw FormatError("rig needs 9 rotation and 3 translation numbers");
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      rig.rotation(r, c) = rotation[static_cast<std::size_t>(3 * r + c)];
    }
    rig.translation(r) = translation[static_cast<std::size_t>(r)];
  }
  rig.validate();
  return rig;
}

nlohmann::json rig_to_json_value(const geom::StereoRig& rig) {
  std::vector<double> rotation;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      rotation.push_back(rig.rotation(r, c));
    }
  }
  return {{"camera", pinhole_to_json(rig.camera)},
          {"projector", pinhole_to_json(rig.projector)},
          {"rotation", rotation},
          {"translation", {rig.translation.x(), rig.translation.y(), rig.translation.z()}}};
}

}  // namespace procam::detail

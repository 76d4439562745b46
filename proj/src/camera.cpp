#include "npr/camera.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace npr {

Camera::Camera(Vec3 position, Vec3 look_at, Vec3 up, Projection projection, Viewport viewport,
               double near_plane, double far_plane)
    : position_(position),
      look_at_(look_at),
      up_(up),
      projection_(projection),
      viewport_(viewport),
      near_(near_plane),
      far_(far_plane) {
  if (!(near_ > 0.0) || !(near_ < far_)) throw CameraError("camera requires 0 < near < far");
  if (viewport_.width < 16 || viewport_.height < 16) throw CameraError("viewport dimensions must be >= 16");
  if (!is_finite(position_) || !is_finite(look_at_) || !is_finite(up_))
    throw CameraError("camera vectors must be finite");
  forward_ = normalize(look_at_ - position_);
  if (length(look_at_ - position_) == 0.0) throw CameraError("camera position coincides with look_at");
  right_ = cross(forward_, up_);
  if (length(right_) < 1e-9) throw CameraError("camera up vector is parallel to the view direction");
  right_ = normalize(right_);
  true_up_ = cross(right_, forward_);
  const double aspect = static_cast<double>(viewport_.width) / viewport_.height;
  if (const auto* p = std::get_if<Perspective>(&projection_)) {
    if (!(p->fov_y_deg > 1.0 && p->fov_y_deg < 179.0)) throw CameraError("fov_y must lie in (1, 179) degrees");
    half_h_ = std::tan(deg_to_rad(p->fov_y_deg) * 0.5);
  } else {
    const auto& o = std::get<Orthographic>(projection_);
    if (!(o.half_height > 0.0)) throw CameraError("orthographic half_height must be positive");
    half_h_ = o.half_height;
  }
  half_w_ = half_h_ * aspect;
}

Vec3 Camera::to_camera(const Vec3& world) const {
  const Vec3 d = world - position_;
  return {dot(d, right_), dot(d, true_up_), -dot(d, forward_)};
}

Vec3 Camera::direction_to_camera(const Vec3& v) const {
  return {dot(v, right_), dot(v, true_up_), -dot(v, forward_)};
}

Vec3 Camera::from_camera(const Vec3& c) const {
  return position_ + right_ * c.x + true_up_ * c.y - forward_ * c.z;
}

ScreenPoint Camera::project_camera_space(const Vec3& c) const {
  const double vd = -c.z;
  double nx = 0.0;
  double ny = 0.0;
  if (is_perspective()) {
    nx = c.x / (vd * half_w_);
    ny = c.y / (vd * half_h_);
  } else {
    nx = c.x / half_w_;
    ny = c.y / half_h_;
  }
  return {(nx + 1.0) * 0.5 * viewport_.width, (1.0 - ny) * 0.5 * viewport_.height, vd};
}

ScreenPoint Camera::project(const Vec3& world) const { return project_camera_space(to_camera(world)); }

Vec3 Camera::unproject(double sx, double sy, double view_depth) const {
  const double nx = 2.0 * sx / viewport_.width - 1.0;
  const double ny = 1.0 - 2.0 * sy / viewport_.height;
  const double scale = is_perspective() ? view_depth : 1.0;
  return from_camera({nx * half_w_ * scale, ny * half_h_ * scale, -view_depth});
}

void Camera::ray(double sx, double sy, Vec3& origin, Vec3& direction) const {
  if (is_perspective()) {
    origin = position_;
    direction = normalize(unproject(sx, sy, 1.0) - position_);
  } else {
    origin = unproject(sx, sy, 0.0);
    direction = forward_;
  }
}

Vec3 Camera::view_direction(const Vec3& world) const {
  return is_perspective() ? normalize(position_ - world) : -forward_;
}

Camera frame_mesh(const Mesh& mesh, Viewport viewport, double azimuth_deg, double elevation_deg,
                  double fov_y_deg) {
  const Bounds b = bounds(mesh);
  const Vec3 center = b.center();
  const double radius = std::max(bounding_radius(mesh, center), 1e-6);
  const double az = deg_to_rad(azimuth_deg);
  const double el = deg_to_rad(elevation_deg);
  const Vec3 dir{std::cos(el) * std::cos(az), std::sin(el), std::cos(el) * std::sin(az)};
  const double aspect = static_cast<double>(viewport.width) / viewport.height;
  const double half_fov = deg_to_rad(fov_y_deg) * 0.5;
  const double fit = std::min(std::sin(half_fov), std::sin(std::atan(std::tan(half_fov) * aspect)));
  const double distance = radius / fit * 1.05;
  const Vec3 up = std::abs(std::sin(el)) > 0.999 ? Vec3{0, 0, -1} : Vec3{0, 1, 0};
  const ClipRange clip = fit_clip_range(distance, radius);
  return Camera(center + dir * distance, center, up, Perspective{fov_y_deg}, viewport, clip.near_plane, clip.far_plane);
}

ClipRange fit_clip_range(double center_distance, double radius) {
  const double d = std::max(center_distance, 0.0);
  const double floor = 1e-3 * std::max(d, radius);
  const double near_plane = std::max(std::min(d - radius * 1.02, d * 0.1), floor);
  const double far_plane = std::max(d * 10.0, d + radius * 1.02);
  return {near_plane, std::max(far_plane, near_plane * 2.0)};
}

DirectionalLight light_from_angles(double azimuth_deg, double elevation_deg) {
  if (!(elevation_deg > 0.0 && elevation_deg <= 90.0) || !std::isfinite(azimuth_deg)) {
    throw CameraError("light elevation must lie in (0, 90] degrees, got " + std::to_string(elevation_deg));
  }
  const double az = deg_to_rad(azimuth_deg);
  const double el = deg_to_rad(elevation_deg);
  DirectionalLight light;
  light.azimuth_deg = azimuth_deg;
  light.elevation_deg = elevation_deg;
  if (elevation_deg == 90.0) {
    light.direction = {0.0, 1.0, 0.0};
  } else {
    light.direction = normalize(Vec3{std::cos(el) * std::cos(az), std::sin(el), std::cos(el) * std::sin(az)});
  }
  return light;
}

double ground_shadow_length_per_height(const DirectionalLight& light) {
  const Vec3& d = light.direction;
  return std::hypot(d.x, d.z) / d.y;
}

}  // namespace npr

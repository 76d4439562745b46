#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>

#include "npr/mesh.hpp"
#include "npr/vec.hpp"

namespace npr {

class CameraError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Perspective {
  double fov_y_deg = 35.0;
};

struct Orthographic {
  double half_height = 1.0;
};

using Projection = std::variant<Perspective, Orthographic>;

struct Viewport {
  int width = 512;
  int height = 512;
  bool operator==(const Viewport&) const = default;
};

// A point after projection: pixel coordinates (origin top-left, y down) and
// view-space depth along the viewing axis.
struct ScreenPoint {
  double x = 0.0;
  double y = 0.0;
  double view_depth = 0.0;
};

// Right-handed look-at camera looking down its local -z axis.
class Camera {
 public:
  Camera(Vec3 position, Vec3 look_at, Vec3 up, Projection projection, Viewport viewport,
         double near_plane, double far_plane);

  const Vec3& position() const { return position_; }
  const Vec3& look_at() const { return look_at_; }
  const Vec3& up() const { return up_; }
  const Projection& projection() const { return projection_; }
  const Viewport& viewport() const { return viewport_; }
  double near_plane() const { return near_; }
  double far_plane() const { return far_; }
  bool is_perspective() const { return std::holds_alternative<Perspective>(projection_); }

  const Vec3& right() const { return right_; }
  const Vec3& true_up() const { return true_up_; }
  const Vec3& forward() const { return forward_; }

  // Camera-space coordinates (x right, y up, z toward the viewer).
  Vec3 to_camera(const Vec3& world) const;
  Vec3 direction_to_camera(const Vec3& world_dir) const;
  Vec3 from_camera(const Vec3& cam) const;

  ScreenPoint project(const Vec3& world) const;
  ScreenPoint project_camera_space(const Vec3& cam) const;

  // Maps view depth into [0,1] between the near and far planes.
  double normalized_depth(double view_depth) const { return (view_depth - near_) / (far_ - near_); }
  double view_depth_from_normalized(double d) const { return near_ + d * (far_ - near_); }

  // World-space point on the ray through pixel coordinate (sx, sy) at the given view depth.
  Vec3 unproject(double sx, double sy, double view_depth) const;

  // Unit ray through pixel coordinate (sx, sy); origin on the near plane for orthographic.
  void ray(double sx, double sy, Vec3& origin, Vec3& direction) const;

  // Unit vector from a world point toward the viewer.
  Vec3 view_direction(const Vec3& world) const;

  // Half extents of the image plane at unit view depth (perspective) or absolute (orthographic).
  double half_width_factor() const { return half_w_; }
  double half_height_factor() const { return half_h_; }

 private:
  Vec3 position_;
  Vec3 look_at_;
  Vec3 up_;
  Projection projection_;
  Viewport viewport_;
  double near_;
  double far_;
  Vec3 right_;
  Vec3 true_up_;
  Vec3 forward_;
  double half_w_ = 1.0;
  double half_h_ = 1.0;
};

struct ClipRange {
  double near_plane;
  double far_plane;
};

// Near/far for a sphere whose center lies center_distance along the view axis. The range
// is deliberately wide (about 0.1x to 10x the distance) so the normalized depth of a
// sloped face changes by less than one 8-bit step across a few pixels.
ClipRange fit_clip_range(double center_distance, double radius);

// Frames the mesh's bounding sphere from the given orbit angles (degrees); y is up.
Camera frame_mesh(const Mesh& mesh, Viewport viewport, double azimuth_deg = 30.0,
                  double elevation_deg = 20.0, double fov_y_deg = 35.0);

inline double face_orientation(std::uint32_t face, const Mesh& mesh, const Camera& camera) {
  return face_orientation(face, mesh, camera.position());
}

// World is y-up with the ground plane at y = const. Azimuth is measured from +x toward +z.
struct DirectionalLight {
  double azimuth_deg = 45.0;
  double elevation_deg = 45.0;
  Vec3 direction;  // unit, from the scene toward the light
};

// Elevation must lie in (0, 90]. Throws CameraError otherwise.
DirectionalLight light_from_angles(double azimuth_deg, double elevation_deg);

// Planar length of the shadow cast by a vertical pole of unit height.
double ground_shadow_length_per_height(const DirectionalLight& light);

}  // namespace npr

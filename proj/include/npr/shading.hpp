#pragma once

#include "npr/raster.hpp"
#include "npr/vec.hpp"

namespace npr {

// Intensity-only Phong: the diffuse term carries no hue, so every term is a brightness.
struct ShadingParams {
  double ambient = 0.55;  // darkest regions of the reference drawing
  double kd = 0.25;       // ambient + kd reaches the 0.8 lit ceiling
  double ks = 0.10;
  double shininess = 24.0;
};

// clamp(ambient + kd*max(0, n.l) + ks*max(0, r.v)^shininess, 0, 1), r = reflect(-l, n).
double shade_point(const Vec3& normal, const Vec3& light_dir, const Vec3& view_dir, const ShadingParams& p);

Shader phong_shader(const ShadingParams& p, const Vec3& light_dir);

}  // namespace npr

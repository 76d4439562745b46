#include "npr/shading.hpp"

#include <algorithm>
#include <cmath>

namespace npr {

double shade_point(const Vec3& normal, const Vec3& light_dir, const Vec3& view_dir, const ShadingParams& p) {
  const double n_dot_l = dot(normal, light_dir);
  const double diffuse = std::max(0.0, n_dot_l);
  double specular = 0.0;
  if (p.ks > 0.0) {
    const Vec3 r = normal * (2.0 * n_dot_l) - light_dir;
    const double r_dot_v = dot(r, view_dir);
    if (r_dot_v > 0.0) specular = std::pow(r_dot_v, p.shininess);
  }
  return std::clamp(p.ambient + p.kd * diffuse + p.ks * specular, 0.0, 1.0);
}

Shader phong_shader(const ShadingParams& p, const Vec3& light_dir) {
  return [p, light_dir](const ShadeSample& s) { return shade_point(s.normal, light_dir, s.view_dir, p); };
}

}  // namespace npr

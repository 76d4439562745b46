#include "npr/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "npr/parallel.hpp"

namespace npr {

ShadowMap build_shadow_map(const Mesh& mesh, const DirectionalLight& light, Viewport viewport) {
  if (mesh.faces.empty()) throw ShadowError("build_shadow_map: mesh has no faces");
  const Vec3 center = bounds(mesh).center();
  const double radius = std::max(bounding_radius(mesh, center), 1e-9) * 1.01;
  const Viewport map_size{viewport.width * 2, viewport.height * 2};
  const double aspect = static_cast<double>(viewport.width) / viewport.height;
  const Vec3 up = std::abs(light.direction.y) > 0.99 ? Vec3{0, 0, -1} : Vec3{0, 1, 0};
  Camera light_camera(center + light.direction * (2.0 * radius), center, up,
                      Orthographic{radius * std::max(1.0, 1.0 / aspect)}, map_size, radius, 3.0 * radius);
  VisibilityBuffer vis = rasterize_visibility(mesh, light_camera);
  Image<float> depth(map_size.width, map_size.height, 1.0f);
  for (std::size_t i = 0; i < depth.size(); ++i) depth[i] = static_cast<float>(vis.depth[i]);

  // orthographic light: depth is affine in map coordinates over each face
  std::vector<std::array<double, 3>> planes(mesh.faces.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  parallel_for(mesh.faces.size(), 4096, [&](std::size_t b, std::size_t e) {
    for (std::size_t f = b; f < e; ++f) {
      std::array<ScreenPoint, 3> s;
      std::array<double, 3> d;
      for (int k = 0; k < 3; ++k) {
        s[k] = light_camera.project(mesh.vertices[mesh.faces[f][k]]);
        d[k] = light_camera.normalized_depth(s[k].view_depth);
      }
      const double x1 = s[1].x - s[0].x, y1 = s[1].y - s[0].y, d1 = d[1] - d[0];
      const double x2 = s[2].x - s[0].x, y2 = s[2].y - s[0].y, d2 = d[2] - d[0];
      const double det = x1 * y2 - x2 * y1;
      if (std::abs(det) < 1e-6) {
        planes[f] = {nan, nan, nan};
        continue;
      }
      const double a = (d1 * y2 - d2 * y1) / det;
      const double bb = (x1 * d2 - x2 * d1) / det;
      planes[f] = {a, bb, d[0] - a * s[0].x - bb * s[0].y};
    }
  });
  return {light_camera, std::move(depth), std::move(vis.face), std::move(planes)};
}

double stored_depth(const ShadowMap& sm, double x, double y) {
  const int tx = static_cast<int>(x);
  const int ty = static_cast<int>(y);
  const double texel = sm.depth.at(tx, ty);
  const std::uint32_t f = sm.face.at(tx, ty);
  if (f == kNoSurface) return texel;
  const auto& pl = sm.depth_planes[f];
  if (std::isnan(pl[0])) return texel;
  return pl[0] * x + pl[1] * y + pl[2];
}

double light_depth(const ShadowMap& sm, const Vec3& world) {
  return sm.light_camera.normalized_depth(sm.light_camera.project(world).view_depth);
}

FailureResult compute_failure_map(const VisibilityBuffer& vis, const Camera& camera, const ShadowMap& sm, double bias) {
  if (bias < 0.0) throw std::invalid_argument("compute_failure_map: bias must be >= 0");
  FailureResult result{FailureMap(vis.width(), vis.height(), 0.0f), 0};
  std::vector<std::size_t> outside(static_cast<std::size_t>(vis.height()), 0);
  parallel_for(static_cast<std::size_t>(vis.height()), 8, [&](std::size_t yb, std::size_t ye) {
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < vis.width(); ++x) {
        if (!vis.covered(x, y)) continue;
        const Vec3 p = pixel_world_position(vis, camera, x, y);
        const ScreenPoint s = sm.light_camera.project(p);
        if (!(s.x >= 0 && s.y >= 0 && s.x < sm.width() && s.y < sm.height())) {
          ++outside[y];
          continue;
        }
        const double stored = stored_depth(sm, s.x, s.y);
        const double own = sm.light_camera.normalized_depth(s.view_depth);
        if (stored + bias < own) result.map.at(x, y) = 1.0f;
      }
    }
  });
  for (auto n : outside) result.outside_map += n;
  return result;
}

FailureMap pcf_filter(const FailureMap& fm, int kernel_radius) {
  if (kernel_radius < 0) throw std::invalid_argument("pcf_filter: kernel radius must be >= 0");
  if (kernel_radius == 0) return fm;
  const int w = fm.width();
  const int h = fm.height();
  const int r = kernel_radius;
  const double window = static_cast<double>((2 * r + 1) * (2 * r + 1));
  // Edge clamping is per axis, so the square window separates exactly.
  Image<double> horizontal(w, h, 0.0);
  parallel_for(static_cast<std::size_t>(h), 8, [&](std::size_t yb, std::size_t ye) {
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < w; ++x) {
        double sum = 0.0;
        for (int k = -r; k <= r; ++k) sum += fm.clamped(x + k, y);
        horizontal.at(x, y) = sum;
      }
    }
  });
  FailureMap out(w, h, 0.0f);
  parallel_for(static_cast<std::size_t>(h), 8, [&](std::size_t yb, std::size_t ye) {
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < w; ++x) {
        double sum = 0.0;
        for (int k = -r; k <= r; ++k) sum += horizontal.clamped(x, y + k);
        out.at(x, y) = static_cast<float>(sum / window);
      }
    }
  });
  return out;
}

IntensityImage apply_shadows(const IntensityImage& shaded, const FailureMap& fractions, double ambient) {
  require_same_size(shaded, fractions, "apply_shadows");
  IntensityImage out(shaded.width(), shaded.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = std::clamp(static_cast<double>(fractions[i]), 0.0, 1.0);
    out[i] = static_cast<float>((1.0 - s) * shaded[i] + s * ambient);
  }
  return out;
}

}  // namespace npr

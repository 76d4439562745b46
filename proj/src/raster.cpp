#include "npr/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "npr/parallel.hpp"

namespace npr {

namespace {

constexpr int kSubpixelBits = 8;
constexpr std::int64_t kSubpixel = 1 << kSubpixelBits;
constexpr int kBandRows = 16;
// Clip polygons to a guard band this many half-viewports wide so fixed-point
// coordinates stay far from overflow.
constexpr double kGuardBand = 4.0;

struct TriSetup {
  std::array<std::int64_t, 3> x;
  std::array<std::int64_t, 3> y;
  std::array<double, 3> attr;  // 1/view_depth for perspective, view_depth for orthographic
  std::int64_t area;
  std::array<std::int64_t, 3> bias;
  int minx, maxx, miny, maxy;
  std::uint32_t face;
};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

using Poly = std::vector<Vec3>;

struct ClipPlane {
  // Inside iff a*x + b*y + c*z + d >= 0 in camera space.
  double a, b, c, d;
  double eval(const Vec3& p) const { return a * p.x + b * p.y + c * p.z + d; }
};

std::vector<ClipPlane> clip_planes(const Camera& cam) {
  const double gw = kGuardBand * cam.half_width_factor();
  const double gh = kGuardBand * cam.half_height_factor();
  std::vector<ClipPlane> planes;
  planes.push_back({0, 0, -1, -cam.near_plane()});  // view depth >= near
  if (cam.is_perspective()) {
    planes.push_back({-1, 0, -gw, 0});
    planes.push_back({1, 0, -gw, 0});
    planes.push_back({0, -1, -gh, 0});
    planes.push_back({0, 1, -gh, 0});
  } else {
    planes.push_back({-1, 0, 0, gw});
    planes.push_back({1, 0, 0, gw});
    planes.push_back({0, -1, 0, gh});
    planes.push_back({0, 1, 0, gh});
  }
  return planes;
}

void clip_polygon(Poly& poly, const ClipPlane& plane, Poly& scratch) {
  scratch.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % n];
    const double da = plane.eval(a);
    const double db = plane.eval(b);
    if (da >= 0) scratch.push_back(a);
    if ((da >= 0) != (db >= 0)) scratch.push_back(lerp(a, b, da / (da - db)));
  }
  poly.swap(scratch);
}

bool make_setup(const std::array<ScreenPoint, 3>& s, bool perspective, const Viewport& vp,
                std::uint32_t face, TriSetup& out) {
  for (int k = 0; k < 3; ++k) {
    out.x[k] = std::llround(s[k].x * kSubpixel);
    out.y[k] = std::llround(s[k].y * kSubpixel);
    out.attr[k] = perspective ? 1.0 / s[k].view_depth : s[k].view_depth;
  }
  auto edge = [&](int a, int b, int c) {
    return (out.x[b] - out.x[a]) * (out.y[c] - out.y[a]) - (out.y[b] - out.y[a]) * (out.x[c] - out.x[a]);
  };
  std::int64_t area = edge(0, 1, 2);
  if (area == 0) return false;
  if (area < 0) {
    std::swap(out.x[1], out.x[2]);
    std::swap(out.y[1], out.y[2]);
    std::swap(out.attr[1], out.attr[2]);
    area = -area;
  }
  out.area = area;
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3;  // edge k is opposite vertex k
    const int b = (k + 2) % 3;
    const std::int64_t dx = out.x[b] - out.x[a];
    const std::int64_t dy = out.y[b] - out.y[a];
    const bool top_left = (dy == 0 && dx > 0) || dy < 0;
    out.bias[k] = top_left ? 0 : -1;
  }
  const std::int64_t half = kSubpixel / 2;
  const auto [xmin, xmax] = std::minmax({out.x[0], out.x[1], out.x[2]});
  const auto [ymin, ymax] = std::minmax({out.y[0], out.y[1], out.y[2]});
  out.minx = static_cast<int>(std::max<std::int64_t>(0, ceil_div(xmin - half, kSubpixel)));
  out.maxx = static_cast<int>(std::min<std::int64_t>(vp.width - 1, floor_div(xmax - half, kSubpixel)));
  out.miny = static_cast<int>(std::max<std::int64_t>(0, ceil_div(ymin - half, kSubpixel)));
  out.maxy = static_cast<int>(std::min<std::int64_t>(vp.height - 1, floor_div(ymax - half, kSubpixel)));
  out.face = face;
  return out.minx <= out.maxx && out.miny <= out.maxy;
}

void setup_face(const Mesh& mesh, const Camera& cam, const std::vector<ClipPlane>& planes, std::uint32_t f,
                std::vector<TriSetup>& out, Poly& poly, Poly& scratch) {
  const Face& face = mesh.faces[f];
  std::array<Vec3, 3> c{cam.to_camera(mesh.vertices[face[0]]), cam.to_camera(mesh.vertices[face[1]]),
                        cam.to_camera(mesh.vertices[face[2]])};
  bool inside = true;
  for (const auto& pl : planes) {
    const double e0 = pl.eval(c[0]), e1 = pl.eval(c[1]), e2 = pl.eval(c[2]);
    if (e0 < 0 && e1 < 0 && e2 < 0) return;
    if (e0 < 0 || e1 < 0 || e2 < 0) inside = false;
  }
  const bool persp = cam.is_perspective();
  TriSetup setup;
  if (inside) {
    const std::array<ScreenPoint, 3> s{cam.project_camera_space(c[0]), cam.project_camera_space(c[1]),
                                       cam.project_camera_space(c[2])};
    if (make_setup(s, persp, cam.viewport(), f, setup)) out.push_back(setup);
    return;
  }
  poly.assign(c.begin(), c.end());
  for (const auto& pl : planes) {
    clip_polygon(poly, pl, scratch);
    if (poly.size() < 3) return;
  }
  const ScreenPoint s0 = cam.project_camera_space(poly[0]);
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const std::array<ScreenPoint, 3> s{s0, cam.project_camera_space(poly[k]), cam.project_camera_space(poly[k + 1])};
    if (make_setup(s, persp, cam.viewport(), f, setup)) out.push_back(setup);
  }
}

}  // namespace

VisibilityBuffer rasterize_visibility(const Mesh& mesh, const Camera& camera) {
  const Viewport vp = camera.viewport();
  VisibilityBuffer vis{DepthBuffer(vp.width, vp.height, 1.0), Image<std::uint32_t>(vp.width, vp.height, kNoSurface)};
  if (mesh.faces.empty()) return vis;

  const auto planes = clip_planes(camera);
  const std::size_t nfaces = mesh.faces.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(thread_count() * 4, nfaces / 1024 + 1));
  const std::size_t chunk_size = (nfaces + chunks - 1) / chunks;
  std::vector<std::vector<TriSetup>> per_chunk(chunks);
  parallel_for(chunks, 1, [&](std::size_t cb, std::size_t ce) {
    Poly poly, scratch;
    for (std::size_t c = cb; c < ce; ++c) {
      const std::size_t fb = c * chunk_size;
      const std::size_t fe = std::min(nfaces, fb + chunk_size);
      for (std::size_t f = fb; f < fe; ++f) {
        setup_face(mesh, camera, planes, static_cast<std::uint32_t>(f), per_chunk[c], poly, scratch);
      }
    }
  });

  const int bands = (vp.height + kBandRows - 1) / kBandRows;
  std::vector<std::size_t> band_start(static_cast<std::size_t>(bands) + 1, 0);
  for (const auto& tris : per_chunk) {
    for (const auto& t : tris) {
      for (int b = t.miny / kBandRows; b <= t.maxy / kBandRows; ++b) ++band_start[b + 1];
    }
  }
  for (int b = 0; b < bands; ++b) band_start[b + 1] += band_start[b];
  struct Ref {
    std::uint32_t chunk;
    std::uint32_t index;
  };
  std::vector<Ref> binned(band_start.back());
  std::vector<std::size_t> fill(band_start.begin(), band_start.end() - 1);
  for (std::uint32_t c = 0; c < per_chunk.size(); ++c) {
    for (std::uint32_t i = 0; i < per_chunk[c].size(); ++i) {
      const auto& t = per_chunk[c][i];
      for (int b = t.miny / kBandRows; b <= t.maxy / kBandRows; ++b) binned[fill[b]++] = {c, i};
    }
  }

  const bool persp = camera.is_perspective();
  parallel_for(static_cast<std::size_t>(bands), 1, [&](std::size_t bb, std::size_t be) {
    for (std::size_t band = bb; band < be; ++band) {
      const int row0 = static_cast<int>(band) * kBandRows;
      const int row1 = std::min(vp.height - 1, row0 + kBandRows - 1);
      for (std::size_t r = band_start[band]; r < band_start[band + 1]; ++r) {
        const TriSetup& t = per_chunk[binned[r].chunk][binned[r].index];
        const double inv_area = 1.0 / static_cast<double>(t.area);
        const int y0 = std::max(row0, t.miny);
        const int y1 = std::min(row1, t.maxy);
        for (int y = y0; y <= y1; ++y) {
          const std::int64_t py = static_cast<std::int64_t>(y) * kSubpixel + kSubpixel / 2;
          for (int x = t.minx; x <= t.maxx; ++x) {
            const std::int64_t px = static_cast<std::int64_t>(x) * kSubpixel + kSubpixel / 2;
            std::array<std::int64_t, 3> w;
            bool in = true;
            for (int k = 0; k < 3 && in; ++k) {
              const int a = (k + 1) % 3;
              const int b = (k + 2) % 3;
              w[k] = (t.x[b] - t.x[a]) * (py - t.y[a]) - (t.y[b] - t.y[a]) * (px - t.x[a]);
              in = w[k] + t.bias[k] >= 0;
            }
            if (!in) continue;
            const double attr =
                (static_cast<double>(w[0]) * t.attr[0] + static_cast<double>(w[1]) * t.attr[1] +
                 static_cast<double>(w[2]) * t.attr[2]) *
                inv_area;
            const double vd = persp ? 1.0 / attr : attr;
            const double d = camera.normalized_depth(vd);
            if (d < 0.0 || d > 1.0) continue;
            double& cur = vis.depth.at(x, y);
            std::uint32_t& cur_face = vis.face.at(x, y);
            if (d < cur || (d == cur && t.face < cur_face)) {
              cur = d;
              cur_face = t.face;
            }
          }
        }
      }
    }
  });
  return vis;
}

DepthBuffer rasterize_depth(const Mesh& mesh, const Camera& camera) {
  return rasterize_visibility(mesh, camera).depth;
}

std::uint32_t pack_normal_depth(const Vec3& normal, double depth) {
  auto code = [](double v) {
    return static_cast<std::uint32_t>(std::clamp(static_cast<int>(std::lround((v + 1.0) * 0.5 * 255.0)), 0, 255));
  };
  const auto dcode = static_cast<std::uint32_t>(std::clamp(static_cast<int>(std::lround(depth * 255.0)), 0, 255));
  return (code(normal.x) << 24) | (code(normal.y) << 16) | (code(normal.z) << 8) | dcode;
}

NormalDepth unpack_normal_depth(std::uint32_t texel) {
  auto decode = [](std::uint32_t c) { return static_cast<double>(c) / 255.0 * 2.0 - 1.0; };
  return {{decode((texel >> 24) & 0xFF), decode((texel >> 16) & 0xFF), decode((texel >> 8) & 0xFF)},
          static_cast<double>(texel & 0xFF) / 255.0};
}

NormalDepthMap normal_depth_from(const VisibilityBuffer& vis, const Mesh& mesh, const Camera& camera) {
  NormalDepthMap nd(vis.width(), vis.height(), kNormalDepthBackground);
  parallel_for(static_cast<std::size_t>(vis.height()), 8, [&](std::size_t yb, std::size_t ye) {
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < vis.width(); ++x) {
        const std::uint32_t f = vis.face.at(x, y);
        if (f == kNoSurface) continue;
        nd.at(x, y) = pack_normal_depth(camera.direction_to_camera(mesh.face_normal[f]), vis.depth.at(x, y));
      }
    }
  });
  return nd;
}

NormalDepthMap rasterize_normal_depth(const Mesh& mesh, const Camera& camera) {
  return normal_depth_from(rasterize_visibility(mesh, camera), mesh, camera);
}

Vec3 pixel_world_position(const VisibilityBuffer& vis, const Camera& camera, int x, int y) {
  return camera.unproject(x + 0.5, y + 0.5, camera.view_depth_from_normalized(vis.depth.at(x, y)));
}

IntensityImage shade_visible(const VisibilityBuffer& vis, const Mesh& mesh, const Camera& camera,
                             const Shader& shader, double background) {
  IntensityImage out(vis.width(), vis.height(), static_cast<float>(background));
  parallel_for(static_cast<std::size_t>(vis.height()), 8, [&](std::size_t yb, std::size_t ye) {
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < vis.width(); ++x) {
        const std::uint32_t f = vis.face.at(x, y);
        if (f == kNoSurface) continue;
        ShadeSample s;
        s.position = pixel_world_position(vis, camera, x, y);
        s.normal = mesh.face_normal[f];
        s.view_dir = camera.view_direction(s.position);
        s.face = f;
        out.at(x, y) = static_cast<float>(std::clamp(shader(s), 0.0, 1.0));
      }
    }
  });
  return out;
}

IntensityImage rasterize_shaded(const Mesh& mesh, const Camera& camera, const Shader& shader, double background) {
  return shade_visible(rasterize_visibility(mesh, camera), mesh, camera, shader, background);
}

std::size_t edge_sample_count(const Vec3& p0, const Vec3& p1, const Camera& camera, std::size_t min_samples) {
  const std::size_t floor_count = std::max<std::size_t>(1, min_samples);
  const Vec3 c0 = camera.to_camera(p0);
  const Vec3 c1 = camera.to_camera(p1);
  if (-c0.z < camera.near_plane() || -c1.z < camera.near_plane()) return floor_count;
  const ScreenPoint s0 = camera.project_camera_space(c0);
  const ScreenPoint s1 = camera.project_camera_space(c1);
  const double len = std::hypot(s1.x - s0.x, s1.y - s0.y);
  const double cap = 4.0 * std::max(camera.viewport().width, camera.viewport().height);
  return std::max(floor_count, static_cast<std::size_t>(std::ceil(std::min(len, cap))));
}

IndexBuffer rasterize_ids(std::span<const EdgeCandidate> edges, const Mesh& mesh, const Camera& camera,
                          double depth_offset, std::size_t min_samples) {
  return rasterize_ids(edges, mesh, camera, rasterize_depth(mesh, camera), depth_offset, min_samples);
}

IndexBuffer rasterize_ids(std::span<const EdgeCandidate> edges, const Mesh& mesh, const Camera& camera,
                          const DepthBuffer& occluders, double depth_offset, std::size_t min_samples) {
  const Viewport vp = camera.viewport();
  if (!occluders.same_size(vp.width, vp.height)) throw DimensionError("rasterize_ids: occluder depth size mismatch");
  if (edges.size() >= std::numeric_limits<std::uint32_t>::max())
    throw RasterError("rasterize_ids: edge count exceeds the 32-bit id space");

  IndexBuffer ids(vp.width, vp.height, 0);
  // Nearest edge sample per pixel; ties resolve to the lower id so draw order is irrelevant.
  Image<double> edge_depth(vp.width, vp.height, std::numeric_limits<double>::infinity());
  for (const auto& e : edges) {
    if (e.id == 0) throw RasterError("rasterize_ids: edge ids must be >= 1");
    const Vec3& p0 = mesh.vertices[e.v0];
    const Vec3& p1 = mesh.vertices[e.v1];
    const std::size_t n = edge_sample_count(p0, p1, camera, min_samples);
    for (std::size_t i = 0; i < n; ++i) {
      const ScreenPoint s = camera.project(lerp(p0, p1, edge_sample_t(i, n)));
      if (s.view_depth < camera.near_plane()) continue;
      const double fx = std::floor(s.x);
      const double fy = std::floor(s.y);
      if (fx < 0 || fy < 0 || fx >= vp.width || fy >= vp.height) continue;
      const int x = static_cast<int>(fx);
      const int y = static_cast<int>(fy);
      const double d = camera.normalized_depth(s.view_depth);
      if (d > 1.0) continue;
      if (!(d < occluders.at(x, y) + depth_offset)) continue;
      double& cur = edge_depth.at(x, y);
      std::uint32_t& cur_id = ids.at(x, y);
      if (d < cur || (d == cur && e.id < cur_id)) {
        cur = d;
        cur_id = e.id;
      }
    }
  }
  return ids;
}

}  // namespace npr

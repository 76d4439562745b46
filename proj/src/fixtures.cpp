#include "npr/fixtures.hpp"

#include <cmath>
#include <map>

namespace npr::fixtures {

namespace {

// Adds quad a-b-c-d (counter-clockwise from the front) as two triangles.
void add_quad(std::vector<Face>& faces, std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
  faces.push_back({a, b, c});
  faces.push_back({a, c, d});
}

}  // namespace

Mesh box(const Vec3& lo, const Vec3& hi) {
  std::vector<Vec3> v{
      {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
      {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
  };
  std::vector<Face> f;
  add_quad(f, 4, 5, 6, 7);  // +z
  add_quad(f, 1, 0, 3, 2);  // -z
  add_quad(f, 5, 1, 2, 6);  // +x
  add_quad(f, 0, 4, 7, 3);  // -x
  add_quad(f, 7, 6, 2, 3);  // +y
  add_quad(f, 0, 1, 5, 4);  // -y
  return make_mesh(std::move(v), std::move(f));
}

Mesh cube(double half) { return box({-half, -half, -half}, {half, half, half}); }

Mesh tetrahedron() {
  // Front face in the plane z = 0.5 facing +z; apex behind it.
  std::vector<Vec3> v{{-1.0, -0.8, 0.5}, {1.0, -0.8, 0.5}, {0.0, 1.0, 0.5}, {0.0, 0.0, -1.0}};
  std::vector<Face> f{{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {2, 3, 0}};
  return make_mesh(std::move(v), std::move(f));
}

Mesh rect(double x0, double x1, double y0, double y1, double z0) {
  std::vector<Vec3> v{{x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0}};
  std::vector<Face> f;
  add_quad(f, 0, 1, 2, 3);
  return make_mesh(std::move(v), std::move(f));
}

Mesh quad(double half, double z0) { return rect(-half, half, -half, half, z0); }

Mesh grid(int n, double half) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      v.push_back({-half + 2.0 * half * i / n, -half + 2.0 * half * j / n, 0.0});
    }
  }
  auto id = [n](int i, int j) { return static_cast<std::uint32_t>(j * (n + 1) + i); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) add_quad(f, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
  }
  return make_mesh(std::move(v), std::move(f));
}

Mesh ground(double half, double y0, int n) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      v.push_back({-half + 2.0 * half * i / n, y0, half - 2.0 * half * j / n});
    }
  }
  auto id = [n](int i, int j) { return static_cast<std::uint32_t>(j * (n + 1) + i); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) add_quad(f, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
  }
  return make_mesh(std::move(v), std::move(f));
}

Mesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p = normalize(p) * radius;
  std::vector<Face> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back(normalize((v[a] + v[b]) * 0.5) * radius);
      const auto idx = static_cast<std::uint32_t>(v.size() - 1);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const auto a = mid(tri[0], tri[1]);
      const auto b = mid(tri[1], tri[2]);
      const auto c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f.swap(next);
  }
  return make_mesh(std::move(v), std::move(f));
}

Mesh torus(int ring_segments, int tube_segments, double ring_radius, double tube_radius, double bump) {
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(ring_segments) * tube_segments);
  for (int i = 0; i < ring_segments; ++i) {
    const double u = 2.0 * kPi * i / ring_segments;
    for (int j = 0; j < tube_segments; ++j) {
      const double w = 2.0 * kPi * j / tube_segments;
      const double r = tube_radius * (1.0 + bump * std::sin(5.0 * u) * std::cos(3.0 * w));
      const double rr = ring_radius + r * std::cos(w);
      v.push_back({rr * std::cos(u), r * std::sin(w), rr * std::sin(u)});
    }
  }
  auto id = [&](int i, int j) {
    return static_cast<std::uint32_t>((i % ring_segments) * tube_segments + (j % tube_segments));
  };
  std::vector<Face> f;
  f.reserve(static_cast<std::size_t>(ring_segments) * tube_segments * 2);
  for (int i = 0; i < ring_segments; ++i) {
    for (int j = 0; j < tube_segments; ++j) add_quad(f, id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j));
  }
  return make_mesh(std::move(v), std::move(f));
}

PoleOnPlane pole_on_plane(double height, double half_width, double plane_half) {
  PoleOnPlane p;
  p.height = height;
  p.half_width = half_width;
  p.plane_half = plane_half;
  p.base = {0.0, 0.0, 0.0};
  const Mesh plane = ground(plane_half, 0.0, 1);
  const double a = half_width;
  std::vector<Vec3> v{{-a, 0, -a}, {a, 0, -a}, {a, height, -a}, {-a, height, -a},
                      {-a, 0, a},  {a, 0, a},  {a, height, a},  {-a, height, a}};
  std::vector<Face> f;
  add_quad(f, 4, 5, 6, 7);
  add_quad(f, 1, 0, 3, 2);
  add_quad(f, 5, 1, 2, 6);
  add_quad(f, 0, 4, 7, 3);
  add_quad(f, 7, 6, 2, 3);
  const Mesh pole = make_mesh(std::move(v), std::move(f));
  const std::array<Mesh, 2> parts{plane, pole};
  p.mesh = merge(parts);
  return p;
}

}  // namespace npr::fixtures

#include "npr/contour.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "npr/parallel.hpp"

namespace npr {

EdgeIdSet classify_silhouette_edges(const Mesh& mesh, const EdgeAdjacency& adjacency, const Vec3& eye) {
  const auto& edges = adjacency.edges;
  std::vector<std::uint8_t> flag(edges.size(), 0);
  parallel_for(edges.size(), 4096, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Edge& edge = edges[i];
      if (edge.face_count != 2) continue;
      const bool f0 = is_front_facing(face_orientation(edge.faces[0], mesh, eye));
      const bool f1 = is_front_facing(face_orientation(edge.faces[1], mesh, eye));
      flag[i] = f0 != f1;
    }
  });
  EdgeIdSet out;
  for (std::size_t i = 0; i < flag.size(); ++i) {
    if (flag[i]) out.push_back(edge_id(i));
  }
  return out;
}

EdgeIdSet classify_border_edges(const EdgeAdjacency& adjacency) {
  EdgeIdSet out;
  for (std::size_t i = 0; i < adjacency.edges.size(); ++i) {
    if (adjacency.edges[i].is_border()) out.push_back(edge_id(i));
  }
  return out;
}

EdgeIdSet classify_crease_edges(const Mesh& mesh, const EdgeAdjacency& adjacency, double threshold_deg) {
  if (!(threshold_deg > 0.0 && threshold_deg < 180.0))
    throw std::invalid_argument("crease threshold must lie in (0, 180) degrees");
  const double cos_threshold = std::cos(deg_to_rad(threshold_deg));
  EdgeIdSet out;
  for (std::size_t i = 0; i < adjacency.edges.size(); ++i) {
    const Edge& e = adjacency.edges[i];
    if (e.face_count != 2) continue;
    const double c = dot(mesh.face_normal[e.faces[0]], mesh.face_normal[e.faces[1]]);
    if (c < cos_threshold) out.push_back(edge_id(i));
  }
  return out;
}

std::vector<EdgeClass> merge_edge_classes(const Mesh& mesh, const EdgeAdjacency& adjacency,
                                          const EdgeIdSet& silhouette, const EdgeIdSet& border,
                                          const EdgeIdSet& crease) {
  std::vector<std::pair<std::uint32_t, std::uint8_t>> tagged;
  tagged.reserve(silhouette.size() + border.size() + crease.size());
  for (auto id : silhouette) tagged.emplace_back(id, static_cast<std::uint8_t>(EdgeKind::silhouette));
  for (auto id : border) tagged.emplace_back(id, static_cast<std::uint8_t>(EdgeKind::border));
  for (auto id : crease) tagged.emplace_back(id, static_cast<std::uint8_t>(EdgeKind::crease));
  std::sort(tagged.begin(), tagged.end());
  std::vector<EdgeClass> out;
  for (const auto& [id, kind] : tagged) {
    if (!out.empty() && out.back().id == id) {
      out.back().kinds |= kind;
      continue;
    }
    const Edge& e = adjacency.edges[edge_index(id)];
    out.push_back({id, kind, mesh.vertices[e.v0], mesh.vertices[e.v1]});
  }
  return out;
}

std::vector<EdgeCandidate> to_candidates(std::span<const EdgeClass> classes, const EdgeAdjacency& adjacency) {
  std::vector<EdgeCandidate> out;
  out.reserve(classes.size());
  for (const auto& c : classes) {
    const Edge& e = adjacency.edges[edge_index(c.id)];
    out.push_back({c.id, e.v0, e.v1});
  }
  return out;
}

std::vector<VisibleSegment> hidden_line_removal(std::span<const EdgeCandidate> candidates, const IndexBuffer& index,
                                                const Mesh& mesh, const Camera& camera, std::size_t min_samples) {
  const Viewport vp = camera.viewport();
  if (!index.same_size(vp.width, vp.height)) throw DimensionError("hidden_line_removal: index buffer size mismatch");
  for (const auto& c : candidates) {
    if (c.id == 0) throw ContourError("hidden_line_removal: edge id 0 is reserved for occluders");
  }

  // Edges meeting at a vertex compete for the pixel under it; a sample next to a shared
  // vertex also counts when that pixel holds the neighbouring edge.
  std::unordered_map<std::uint32_t, const EdgeCandidate*> by_id;
  by_id.reserve(candidates.size());
  for (const auto& c : candidates) by_id.emplace(c.id, &c);
  auto shares_corner = [&](const EdgeCandidate& c, std::uint32_t other, const ScreenPoint& s) {
    const auto it = by_id.find(other);
    if (it == by_id.end()) return false;
    const EdgeCandidate& o = *it->second;
    for (std::uint32_t v : {c.v0, c.v1}) {
      if (v != o.v0 && v != o.v1) continue;
      const ScreenPoint q = camera.project(mesh.vertices[v]);
      if (q.view_depth >= camera.near_plane() && std::abs(q.x - s.x) <= 1.5 && std::abs(q.y - s.y) <= 1.5) return true;
    }
    return false;
  };

  std::vector<std::vector<VisibleSegment>> per_edge(candidates.size());
  parallel_for(candidates.size(), 256, [&](std::size_t b, std::size_t e) {
    for (std::size_t ci = b; ci < e; ++ci) {
      const auto& c = candidates[ci];
      const Vec3& p0 = mesh.vertices[c.v0];
      const Vec3& p1 = mesh.vertices[c.v1];
      const std::size_t n = edge_sample_count(p0, p1, camera, min_samples);
      std::size_t run_start = n;
      auto close_run = [&](std::size_t end) {
        if (run_start < end) {
          per_edge[ci].push_back({c.id, static_cast<double>(run_start) / n, static_cast<double>(end) / n});
        }
        run_start = n;
      };
      for (std::size_t i = 0; i < n; ++i) {
        const ScreenPoint s = camera.project(lerp(p0, p1, edge_sample_t(i, n)));
        bool visible = false;
        if (s.view_depth >= camera.near_plane() && s.x >= 0 && s.y >= 0 && s.x < vp.width && s.y < vp.height) {
          const std::uint32_t id = index.at(static_cast<int>(s.x), static_cast<int>(s.y));
          visible = id == c.id || (id != 0 && shares_corner(c, id, s));
        }
        if (visible && run_start == n) run_start = i;
        if (!visible) close_run(i);
      }
      close_run(n);
    }
  });
  std::vector<VisibleSegment> out;
  for (auto& segs : per_edge) out.insert(out.end(), segs.begin(), segs.end());
  return out;
}

namespace {

void draw_line(LineImage& img, int x0, int y0, int x1, int y1, float value) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    if (x0 >= 0 && y0 >= 0 && x0 < img.width() && y0 < img.height()) {
      float& px = img.at(x0, y0);
      px = std::max(px, value);
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

// Keeps pixel coordinates in a range where int stepping cannot overflow.
int to_pixel(double v) { return static_cast<int>(std::floor(std::clamp(v, -1e6, 1e6))); }

}  // namespace

LineImage render_geometry_lines(std::span<const VisibleSegment> segments, std::span<const EdgeCandidate> candidates,
                                const Mesh& mesh, const Camera& camera, double darkness) {
  const Viewport vp = camera.viewport();
  LineImage img(vp.width, vp.height, 0.0f);
  std::unordered_map<std::uint32_t, const EdgeCandidate*> by_id;
  by_id.reserve(candidates.size());
  for (const auto& c : candidates) by_id.emplace(c.id, &c);
  const auto value = static_cast<float>(std::clamp(darkness, 0.0, 1.0));
  for (const auto& seg : segments) {
    const auto it = by_id.find(seg.edge);
    if (it == by_id.end()) throw ContourError("render_geometry_lines: segment references unknown edge");
    const Vec3& p0 = mesh.vertices[it->second->v0];
    const Vec3& p1 = mesh.vertices[it->second->v1];
    double t0 = seg.t0;
    double t1 = seg.t1;
    // View depth is affine along the world-space edge; clip to the near plane.
    const double d0 = camera.to_camera(lerp(p0, p1, t0)).z * -1.0;
    const double d1 = camera.to_camera(lerp(p0, p1, t1)).z * -1.0;
    const double near_plane = camera.near_plane();
    if (d0 < near_plane && d1 < near_plane) continue;
    if (d0 < near_plane) t0 += (t1 - t0) * (near_plane - d0) / (d1 - d0);
    else if (d1 < near_plane) t1 -= (t1 - t0) * (near_plane - d1) / (d0 - d1);
    const ScreenPoint a = camera.project(lerp(p0, p1, t0));
    const ScreenPoint b = camera.project(lerp(p0, p1, t1));
    draw_line(img, to_pixel(a.x), to_pixel(a.y), to_pixel(b.x), to_pixel(b.y), value);
  }
  return img;
}

std::string edges_to_svg(std::span<const EdgeClass> classes, const Camera& camera) {
  const Viewport vp = camera.viewport();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << vp.width << "\" height=\"" << vp.height
     << "\" viewBox=\"0 0 " << vp.width << ' ' << vp.height << "\">\n";
  for (const auto& c : classes) {
    const ScreenPoint a = camera.project(c.p0);
    const ScreenPoint b = camera.project(c.p1);
    if (a.view_depth < camera.near_plane() || b.view_depth < camera.near_plane()) continue;
    const char* color = c.has(EdgeKind::silhouette) ? "#d00" : c.has(EdgeKind::border) ? "#06c" : "#090";
    os << "  <line data-id=\"" << c.id << "\" x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << b.x << "\" y2=\""
       << b.y << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace npr

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "npr/camera.hpp"
#include "npr/image.hpp"
#include "npr/mesh.hpp"
#include "npr/raster.hpp"

namespace npr {

// Edge ids are 1 + the edge's index in EdgeAdjacency::edges. Sets are sorted ascending.
using EdgeIdSet = std::vector<std::uint32_t>;

inline std::uint32_t edge_id(std::size_t edge_index) { return static_cast<std::uint32_t>(edge_index + 1); }
inline std::size_t edge_index(std::uint32_t id) { return id - 1; }

enum class EdgeKind : std::uint8_t { silhouette = 1, border = 2, crease = 4 };

struct EdgeClass {
  std::uint32_t id = 0;
  std::uint8_t kinds = 0;  // bitwise OR of EdgeKind
  Vec3 p0;
  Vec3 p1;

  bool has(EdgeKind k) const { return (kinds & static_cast<std::uint8_t>(k)) != 0; }
};

// Interior edges whose adjacent faces disagree on front-facing.
EdgeIdSet classify_silhouette_edges(const Mesh& mesh, const EdgeAdjacency& adjacency, const Vec3& eye);
inline EdgeIdSet classify_silhouette_edges(const Mesh& mesh, const EdgeAdjacency& adjacency, const Camera& camera) {
  return classify_silhouette_edges(mesh, adjacency, camera.position());
}

EdgeIdSet classify_border_edges(const EdgeAdjacency& adjacency);

// Interior edges whose face normals differ by more than threshold_deg. Throws
// std::invalid_argument unless threshold_deg lies in (0, 180).
EdgeIdSet classify_crease_edges(const Mesh& mesh, const EdgeAdjacency& adjacency, double threshold_deg);

// Union of the three sets, deduplicated, with kinds merged.
std::vector<EdgeClass> merge_edge_classes(const Mesh& mesh, const EdgeAdjacency& adjacency,
                                          const EdgeIdSet& silhouette, const EdgeIdSet& border,
                                          const EdgeIdSet& crease);

std::vector<EdgeCandidate> to_candidates(std::span<const EdgeClass> classes, const EdgeAdjacency& adjacency);

// Parametric interval of an edge that survived hidden-line removal.
struct VisibleSegment {
  std::uint32_t edge = 0;
  double t0 = 0.0;
  double t1 = 1.0;
  bool operator==(const VisibleSegment&) const = default;
};

class ContourError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Samples each candidate at edge_sample_count(min_samples) points and keeps the runs whose
// index-buffer pixel carries the candidate's id. Throws ContourError for an id the index
// buffer could not contain (0 or beyond max_id).
std::vector<VisibleSegment> hidden_line_removal(std::span<const EdgeCandidate> candidates, const IndexBuffer& index,
                                                const Mesh& mesh, const Camera& camera, std::size_t min_samples = 8);

// 1-px integer-stepped strokes at the given darkness; overlapping strokes take the max.
LineImage render_geometry_lines(std::span<const VisibleSegment> segments, std::span<const EdgeCandidate> candidates,
                                const Mesh& mesh, const Camera& camera, double darkness);

// Debug overlay: classified edges projected into the viewport, one <line> per edge.
std::string edges_to_svg(std::span<const EdgeClass> classes, const Camera& camera);

}  // namespace npr

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "npr/vec.hpp"

namespace npr {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Face = std::array<std::uint32_t, 3>;

// Indexed triangle mesh. Face normals follow counter-clockwise winding.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> face_normal;
  std::vector<Vec3> face_centroid;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
};

struct Bounds {
  Vec3 min;
  Vec3 max;
  Vec3 center() const { return (min + max) * 0.5; }
};

// Builds a mesh, dropping zero-area faces. Throws MeshError on out-of-range indices.
Mesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces);

// Reads OBJ or PLY (ascii / binary_little_endian). Polygons are fan-triangulated.
Mesh load_mesh(const std::filesystem::path& path);
Mesh parse_obj(std::string_view text, const std::string& origin = "<memory>");

void write_obj(const Mesh& mesh, const std::filesystem::path& path);

Bounds bounds(const Mesh& mesh);
// Radius of the sphere centered at the bounds center enclosing every vertex.
double bounding_radius(const Mesh& mesh, const Vec3& center);

// Concatenates meshes; indices of later meshes are offset.
Mesh merge(std::span<const Mesh> parts);

inline constexpr std::uint32_t kNoFace = std::numeric_limits<std::uint32_t>::max();

struct Edge {
  std::uint32_t v0 = 0;  // v0 < v1
  std::uint32_t v1 = 0;
  std::array<std::uint32_t, 2> faces{kNoFace, kNoFace};
  std::uint8_t face_count = 0;

  bool is_border() const { return face_count == 1; }
};

// Undirected edges sorted by (v0, v1); each adjacent to one (border) or two faces.
struct EdgeAdjacency {
  std::vector<Edge> edges;
};

// Throws MeshError naming the edge coordinates when an edge has three or more faces.
EdgeAdjacency build_adjacency(const Mesh& mesh);

// n_face . (centroid - eye). Front-facing iff the value is negative.
double face_orientation(std::uint32_t face, const Mesh& mesh, const Vec3& eye);

inline bool is_front_facing(double orientation) { return orientation < 0.0; }

}  // namespace npr

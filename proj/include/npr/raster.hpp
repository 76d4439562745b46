#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>

#include "npr/camera.hpp"
#include "npr/image.hpp"
#include "npr/mesh.hpp"

namespace npr {

inline constexpr std::uint32_t kNoSurface = std::numeric_limits<std::uint32_t>::max();

// Normalized depth in [0,1]; background is 1.0.
using DepthBuffer = Image<double>;

// Nearest surface per pixel: normalized depth plus the covering face (kNoSurface on background).
// Produced by a single triangle pass; depth, normal-depth and shaded images derive from it.
struct VisibilityBuffer {
  DepthBuffer depth;
  Image<std::uint32_t> face;

  int width() const { return depth.width(); }
  int height() const { return depth.height(); }
  bool covered(int x, int y) const { return face.at(x, y) != kNoSurface; }
};

// Deterministic for any worker count: pixel ties resolve to the lower face index.
// Fill rule is top-left with vertex positions snapped to 1/256 px.
VisibilityBuffer rasterize_visibility(const Mesh& mesh, const Camera& camera);

DepthBuffer rasterize_depth(const Mesh& mesh, const Camera& camera);

// Packed 32-bit texel: R,G,B carry the camera-space normal as (n+1)/2*255,
// A carries the 8-bit normalized depth. Layout 0xRRGGBBAA.
class NormalDepthMap : public Image<std::uint32_t> {
 public:
  using Image<std::uint32_t>::Image;
};

inline constexpr std::uint32_t kNormalDepthBackground = 0x000000FFu;

struct NormalDepth {
  Vec3 normal;
  double depth = 1.0;
};

std::uint32_t pack_normal_depth(const Vec3& normal, double depth);
NormalDepth unpack_normal_depth(std::uint32_t texel);

NormalDepthMap rasterize_normal_depth(const Mesh& mesh, const Camera& camera);
NormalDepthMap normal_depth_from(const VisibilityBuffer& vis, const Mesh& mesh, const Camera& camera);

// Everything a per-pixel shading function sees for the nearest surface.
struct ShadeSample {
  Vec3 position;
  Vec3 normal;    // world-space unit face normal
  Vec3 view_dir;  // unit, toward the viewer
  std::uint32_t face = 0;
};

using Shader = std::function<double(const ShadeSample&)>;

IntensityImage rasterize_shaded(const Mesh& mesh, const Camera& camera, const Shader& shader,
                                double background);
IntensityImage shade_visible(const VisibilityBuffer& vis, const Mesh& mesh, const Camera& camera,
                             const Shader& shader, double background);

// Reconstructs the world position at a covered pixel center.
Vec3 pixel_world_position(const VisibilityBuffer& vis, const Camera& camera, int x, int y);

// Per-pixel edge identity; 0 = background or occluding surface.
class IndexBuffer : public Image<std::uint32_t> {
 public:
  using Image<std::uint32_t>::Image;
};

struct EdgeCandidate {
  std::uint32_t id = 0;  // >= 1
  std::uint32_t v0 = 0;
  std::uint32_t v1 = 0;
};

class RasterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of parametric samples used to draw and to test one edge:
// max(min_samples, projected length in pixels).
std::size_t edge_sample_count(const Vec3& p0, const Vec3& p1, const Camera& camera, std::size_t min_samples);

// Sample i sits at t = (i + 0.5) / n along the edge.
inline double edge_sample_t(std::size_t i, std::size_t n) {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

// Draws each edge at its sample points with its id. Occluding faces carry id 0 and
// lose to an edge sample unless nearer by more than depth_offset, so an edge lying on
// its own faces stays visible.
IndexBuffer rasterize_ids(std::span<const EdgeCandidate> edges, const Mesh& mesh, const Camera& camera,
                          double depth_offset, std::size_t min_samples = 8);
IndexBuffer rasterize_ids(std::span<const EdgeCandidate> edges, const Mesh& mesh, const Camera& camera,
                          const DepthBuffer& occluders, double depth_offset, std::size_t min_samples = 8);

}  // namespace npr

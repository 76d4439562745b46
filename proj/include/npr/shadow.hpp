#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "npr/camera.hpp"
#include "npr/image.hpp"
#include "npr/mesh.hpp"
#include "npr/raster.hpp"

namespace npr {

// Depth of the scene as seen from a directional light through an orthographic frame
// that encloses the mesh's bounding sphere. Twice the viewport size in each direction.
struct ShadowMap {
  Camera light_camera;
  Image<float> depth;  // normalized light-frame depth, 1.0 where nothing is hit
  Image<std::uint32_t> face;  // nearest face per texel, kNoSurface where nothing is hit
  // Per face: normalized light depth as a*x + b*y + c over map pixel coordinates.
  // NaN when the face is edge-on to the light.
  std::vector<std::array<double, 3>> depth_planes;

  int width() const { return depth.width(); }
  int height() const { return depth.height(); }
};

class ShadowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ShadowMap build_shadow_map(const Mesh& mesh, const DirectionalLight& light, Viewport viewport);

// Normalized light-frame depth of a world point.
double light_depth(const ShadowMap& sm, const Vec3& world);

// Depth of the surface recorded in the texel under map position (x, y), evaluated at
// that exact position rather than at the texel center.
double stored_depth(const ShadowMap& sm, double x, double y);

// Binary {0,1} before filtering, fractions in [0,1] after.
using FailureMap = Image<float>;

struct FailureResult {
  FailureMap map;
  std::size_t outside_map = 0;  // covered pixels that projected outside the shadow map (treated as lit)
};

// A covered pixel fails iff stored depth + bias < its own light-frame depth.
// The stored depth comes from stored_depth, so a surface never shadows itself.
FailureResult compute_failure_map(const VisibilityBuffer& vis, const Camera& camera, const ShadowMap& sm, double bias);

// Mean of the (2r+1)^2 neighbourhood with edge clamping; r = 0 is the identity.
FailureMap pcf_filter(const FailureMap& fm, int kernel_radius);

// (1 - s) * shaded + s * ambient per pixel.
IntensityImage apply_shadows(const IntensityImage& shaded, const FailureMap& fractions, double ambient);

}  // namespace npr

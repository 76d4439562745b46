#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "npr/camera.hpp"
#include "npr/contour.hpp"
#include "npr/image.hpp"
#include "npr/lines.hpp"
#include "npr/mesh.hpp"
#include "npr/raster.hpp"
#include "npr/shading.hpp"
#include "npr/shadow.hpp"
#include "npr/style_params.hpp"

namespace npr {

// A mesh with its adjacency and the view-independent edge sets. Immutable after
// construction apart from the crease cache, which is internally synchronized.
class PreparedMesh {
 public:
  explicit PreparedMesh(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  const EdgeAdjacency& adjacency() const { return adjacency_; }
  const EdgeIdSet& border_edges() const { return border_; }
  EdgeIdSet crease_edges(double threshold_deg) const;

 private:
  Mesh mesh_;
  EdgeAdjacency adjacency_;
  EdgeIdSet border_;
  mutable std::mutex crease_mutex_;
  mutable std::map<double, EdgeIdSet> crease_cache_;
};

struct RenderOptions {
  bool shadows = true;
};

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct RenderFrame {
  RenderFrame(Camera cam, DirectionalLight l) : camera(std::move(cam)), light(l) {}

  Camera camera;
  DirectionalLight light;
  std::array<double, 3> tint{1.0, 1.0, 1.0};

  VisibilityBuffer visibility;
  NormalDepthMap normal_depth;
  std::vector<EdgeClass> edges;
  IndexBuffer ids;
  std::vector<VisibleSegment> segments;
  LineImage geometry_lines;
  LineImage nd_lines;
  LineImage composite;
  LineValueImage line_value;
  IntensityImage shaded;
  FailureMap failure;          // binary
  FailureMap shadow_fraction;  // after PCF, zero on background
  std::size_t shadow_outside_map = 0;
  IntensityImage shaded_shadowed;
  IntensityImage final_image;  // shaded_shadowed * line_value, grayscale

  std::vector<StageTiming> timings;
  double total_ms() const;
};

// Raised by render_frame with the failing stage's name.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Throws ValidationError for invalid params.
RenderFrame render_frame(const PreparedMesh& mesh, const Camera& camera, const StyleParams& params,
                         const RenderOptions& options = {});
RenderFrame render_frame(const Mesh& mesh, const Camera& camera, const StyleParams& params,
                         const RenderOptions& options = {});

// Final image as tinted RGB PNG bytes.
std::vector<std::uint8_t> final_png(const RenderFrame& frame);

// Named buffer as a displayable grayscale image. Names: final, lines, shaded, shadow,
// normal_depth (depth channel), depth, geometry_lines, nd_lines, composite, failure.
// Line-darkness buffers are inverted so lines show dark; shadow shows lit as white.
IntensityImage frame_buffer(const RenderFrame& frame, const std::string& name);
std::vector<std::string> frame_buffer_names();

// PNG bytes for a named buffer; final is tinted RGB, normal_depth shows the normal code as RGB.
std::vector<std::uint8_t> buffer_png(const RenderFrame& frame, const std::string& name);

}  // namespace npr

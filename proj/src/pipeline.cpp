#include "npr/pipeline.hpp"

#include <chrono>

namespace npr {

PreparedMesh::PreparedMesh(Mesh mesh)
    : mesh_(std::move(mesh)), adjacency_(build_adjacency(mesh_)), border_(classify_border_edges(adjacency_)) {}

EdgeIdSet PreparedMesh::crease_edges(double threshold_deg) const {
  std::lock_guard lock(crease_mutex_);
  auto it = crease_cache_.find(threshold_deg);
  if (it == crease_cache_.end()) {
    it = crease_cache_.emplace(threshold_deg, classify_crease_edges(mesh_, adjacency_, threshold_deg)).first;
  }
  return it->second;
}

double RenderFrame::total_ms() const {
  double sum = 0.0;
  for (const auto& t : timings) sum += t.ms;
  return sum;
}

namespace {

class StageClock {
 public:
  explicit StageClock(RenderFrame& frame) : frame_(frame) {}

  template <typename Fn>
  void run(const char* stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
    const auto end = std::chrono::steady_clock::now();
    frame_.timings.push_back({stage, std::chrono::duration<double, std::milli>(end - start).count()});
  }

 private:
  RenderFrame& frame_;
};

}  // namespace

RenderFrame render_frame(const PreparedMesh& prepared, const Camera& camera, const StyleParams& params,
                         const RenderOptions& options) {
  if (auto violations = validate_params(params); !violations.empty()) throw ValidationError(std::move(violations));

  const Mesh& mesh = prepared.mesh();
  RenderFrame frame(camera, light_from_angles(params.light_azimuth_deg, params.light_elevation_deg));
  frame.tint = params.paper_tint;
  StageClock clock(frame);
  const auto min_samples = static_cast<std::size_t>(params.samples_per_edge_min);

  clock.run("visibility", [&] { frame.visibility = rasterize_visibility(mesh, camera); });
  clock.run("normal_depth", [&] { frame.normal_depth = normal_depth_from(frame.visibility, mesh, camera); });
  std::vector<EdgeCandidate> candidates;
  clock.run("classify_edges", [&] {
    const EdgeIdSet silhouette = classify_silhouette_edges(mesh, prepared.adjacency(), camera);
    frame.edges = merge_edge_classes(mesh, prepared.adjacency(), silhouette, prepared.border_edges(),
                                     prepared.crease_edges(params.crease_threshold_deg));
    candidates = to_candidates(frame.edges, prepared.adjacency());
  });
  clock.run("index_buffer", [&] {
    frame.ids = rasterize_ids(candidates, mesh, camera, frame.visibility.depth, params.depth_offset, min_samples);
  });
  clock.run("hidden_line_removal",
            [&] { frame.segments = hidden_line_removal(candidates, frame.ids, mesh, camera, min_samples); });
  clock.run("geometry_lines", [&] {
    frame.geometry_lines = render_geometry_lines(frame.segments, candidates, mesh, camera, params.geometry_line_darkness);
  });
  clock.run("nd_lines", [&] { frame.nd_lines = detect_nd_edges(frame.normal_depth, params.nd_k_depth, params.nd_k_normal); });
  clock.run("composite", [&] {
    frame.composite = composite_lines(frame.geometry_lines, frame.nd_lines, params.w_geom, params.w_nd, params.blur_radius_px);
    frame.line_value = remap_line_brightness(frame.composite, params.line_threshold, params.line_b_min, params.line_b_max);
  });
  clock.run("shading", [&] {
    const ShadingParams shading{params.ambient, params.kd, params.ks, params.shininess};
    frame.shaded = shade_visible(frame.visibility, mesh, camera, phong_shader(shading, frame.light.direction),
                                 params.background_brightness);
  });
  clock.run("shadows", [&] {
    const int w = camera.viewport().width;
    const int h = camera.viewport().height;
    if (!options.shadows || mesh.faces.empty()) {
      frame.failure = FailureMap(w, h, 0.0f);
      frame.shadow_fraction = FailureMap(w, h, 0.0f);
      frame.shaded_shadowed = frame.shaded;
      return;
    }
    const ShadowMap sm = build_shadow_map(mesh, frame.light, camera.viewport());
    FailureResult failure = compute_failure_map(frame.visibility, camera, sm, params.shadow_bias);
    frame.failure = std::move(failure.map);
    frame.shadow_outside_map = failure.outside_map;
    frame.shadow_fraction = pcf_filter(frame.failure, params.pcf_radius_px);
    // The background carries no geometry, so filtering must not bleed shadow onto it.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!frame.visibility.covered(x, y)) frame.shadow_fraction.at(x, y) = 0.0f;
      }
    }
    frame.shaded_shadowed = apply_shadows(frame.shaded, frame.shadow_fraction, params.ambient);
  });
  clock.run("final", [&] {
    frame.final_image = IntensityImage(camera.viewport().width, camera.viewport().height);
    for (std::size_t i = 0; i < frame.final_image.size(); ++i) {
      frame.final_image[i] = frame.shaded_shadowed[i] * frame.line_value[i];
    }
  });
  return frame;
}

RenderFrame render_frame(const Mesh& mesh, const Camera& camera, const StyleParams& params,
                         const RenderOptions& options) {
  return render_frame(PreparedMesh(mesh), camera, params, options);
}

std::vector<std::uint8_t> final_png(const RenderFrame& frame) {
  return encode_png(to_rgb8(frame.final_image, frame.tint));
}

std::vector<std::string> frame_buffer_names() {
  return {"final",     "lines",       "shaded",  "shadow",    "normal_depth",
          "depth",     "geometry_lines", "nd_lines", "composite", "failure"};
}

IntensityImage frame_buffer(const RenderFrame& frame, const std::string& name) {
  auto inverted = [](const Image<float>& img) {
    IntensityImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = 1.0f - img[i];
    return out;
  };
  if (name == "final") return frame.final_image;
  if (name == "lines") return frame.line_value;
  if (name == "shaded") return frame.shaded_shadowed;
  if (name == "shadow") return inverted(frame.shadow_fraction);
  if (name == "failure") return inverted(frame.failure);
  if (name == "geometry_lines") return inverted(frame.geometry_lines);
  if (name == "nd_lines") return inverted(frame.nd_lines);
  if (name == "composite") return inverted(frame.composite);
  if (name == "depth") {
    IntensityImage out(frame.visibility.width(), frame.visibility.height());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(frame.visibility.depth[i]);
    return out;
  }
  if (name == "normal_depth") {
    IntensityImage out(frame.normal_depth.width(), frame.normal_depth.height());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(frame.normal_depth[i] & 0xFF) / 255.0f;
    return out;
  }
  throw std::invalid_argument("unknown frame buffer '" + name + "'");
}

std::vector<std::uint8_t> buffer_png(const RenderFrame& frame, const std::string& name) {
  if (name == "final") return final_png(frame);
  if (name == "normal_depth") {
    const auto& nd = frame.normal_depth;
    Rgb8Image rgb{nd.width(), nd.height(), std::vector<std::uint8_t>(nd.size() * 3)};
    for (std::size_t i = 0; i < nd.size(); ++i) {
      rgb.rgb[i * 3 + 0] = static_cast<std::uint8_t>(nd[i] >> 24);
      rgb.rgb[i * 3 + 1] = static_cast<std::uint8_t>(nd[i] >> 16);
      rgb.rgb[i * 3 + 2] = static_cast<std::uint8_t>(nd[i] >> 8);
    }
    return encode_png(rgb);
  }
  return encode_png_gray(frame_buffer(frame, name));
}

}  // namespace npr

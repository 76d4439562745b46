#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <string>
#include <vector>

#include <json.hpp>

#include "npr/camera.hpp"
#include "npr/pipeline.hpp"
#include "npr/stylemetrics.hpp"

namespace httplib {
class Server;
}

namespace npr {

// Camera document:
//   {"position": [x,y,z], "look_at": [x,y,z], "up": [x,y,z],
//    "projection": {"type": "perspective", "fov_y_deg": 35} | {"type": "orthographic", "half_height": h},
//    "viewport": [w, h], "near": n, "far": f}
// Without "position" the mesh is framed from "orbit": {"azimuth_deg", "elevation_deg"}.
// Missing near/far are fitted to the mesh's bounding sphere.
Camera camera_from_json(const nlohmann::json& doc, const Mesh& mesh);
nlohmann::json camera_to_json(const Camera& camera);

// Reads a params document; throws ValidationError with every violation.
StyleParams params_from_document(const std::string& text);
StyleParams load_params_file(const std::filesystem::path& path);

// Built-in scene with its own camera and measurement descriptor.
struct FixtureScene {
  Mesh mesh;
  Camera camera;
  std::optional<PoleFixtureDescriptor> pole;
};

// "pole": pole on a ground plane seen from straight above (orthographic).
FixtureScene make_fixture_scene(const std::string& name, Viewport viewport = {512, 512});

struct HttpResult {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

// Request handlers behind the HTTP routes; usable without a socket.
// RenderRequest: {"mesh": id, "camera": {...}, "params": {...},
//                 "outputs": ["final"|"lines"|"shaded"|"shadow"|"normal_depth", ...],
//                 "fixture": "pole" (optional, replaces mesh), "shadows": bool}
class RenderService {
 public:
  explicit RenderService(std::filesystem::path mesh_dir);

  HttpResult list_meshes() const;
  HttpResult params_schema() const;
  HttpResult render(const std::string& body);
  HttpResult metrics(const std::string& body);
  HttpResult last_timings() const;

  // Registers GET /api/meshes, GET /api/params/schema, POST /api/render,
  // POST /api/metrics, GET /api/last-timings.
  void bind(httplib::Server& server);

 private:
  struct MeshEntry {
    std::shared_ptr<const PreparedMesh> mesh;
    std::mutex render_mutex;  // renders of one mesh never overlap
  };
  struct Prepared {
    std::shared_ptr<MeshEntry> entry;
    std::optional<PoleFixtureDescriptor> pole;
    Camera camera;
    StyleParams params;
    RenderOptions options;
    std::vector<std::string> outputs;
  };

  std::vector<std::string> mesh_ids() const;
  std::shared_ptr<MeshEntry> entry_for(const std::string& id);
  // Returns an error result instead of a request on failure.
  std::variant<Prepared, HttpResult> prepare(const std::string& body);
  void record_timings(const RenderFrame& frame);

  std::filesystem::path mesh_dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<MeshEntry>> cache_;
  nlohmann::json last_timings_ = nlohmann::json::object();
};

nlohmann::json timings_to_json(const RenderFrame& frame);

}  // namespace npr

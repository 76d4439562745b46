#include "npr/interface.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "npr/fixtures.hpp"

namespace npr {

namespace {

Vec3 vec_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw CameraError(std::string("camera.") + what + " must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json vec_to_json(const Vec3& v) { return {v.x, v.y, v.z}; }

double number_or(const nlohmann::json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) throw CameraError(std::string("camera.") + key + " must be a number");
  return doc[key].get<double>();
}

const std::vector<std::string>& known_outputs() {
  static const std::vector<std::string> names{"final", "lines", "shaded", "shadow", "normal_depth"};
  return names;
}

HttpResult json_result(int status, const nlohmann::json& doc) { return {status, "application/json", doc.dump(), {}}; }

HttpResult error_result(int status, const std::string& message, const nlohmann::json& violations = nullptr) {
  nlohmann::json doc{{"error", message}};
  if (!violations.is_null()) doc["violations"] = violations;
  return json_result(status, doc);
}

}  // namespace

Camera camera_from_json(const nlohmann::json& doc, const Mesh& mesh) {
  if (!doc.is_object()) throw CameraError("camera must be a JSON object");
  static const std::vector<std::string> keys{"position", "look_at", "up", "projection", "viewport", "near", "far", "orbit"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw CameraError("camera: unknown key '" + key + "'");
  }
  Viewport vp{512, 512};
  if (doc.contains("viewport")) {
    const auto& v = doc["viewport"];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
      throw CameraError("camera.viewport must be [width, height] integers");
    vp = {v[0].get<int>(), v[1].get<int>()};
  }
  Projection projection = Perspective{35.0};
  if (doc.contains("projection")) {
    const auto& p = doc["projection"];
    if (!p.is_object() || !p.contains("type") || !p["type"].is_string()) throw CameraError("camera.projection needs a type");
    const auto type = p["type"].get<std::string>();
    if (type == "perspective") projection = Perspective{number_or(p, "fov_y_deg", 35.0)};
    else if (type == "orthographic") projection = Orthographic{number_or(p, "half_height", 1.0)};
    else throw CameraError("camera.projection.type must be perspective or orthographic");
  }
  if (!doc.contains("position")) {
    double az = 70.0, el = 20.0;
    if (doc.contains("orbit")) {
      az = number_or(doc["orbit"], "azimuth_deg", az);
      el = number_or(doc["orbit"], "elevation_deg", el);
    }
    const double fov = std::holds_alternative<Perspective>(projection) ? std::get<Perspective>(projection).fov_y_deg : 35.0;
    return frame_mesh(mesh, vp, az, el, fov);
  }
  const Vec3 position = vec_from_json(doc["position"], "position");
  const Vec3 look_at = doc.contains("look_at") ? vec_from_json(doc["look_at"], "look_at") : bounds(mesh).center();
  const Vec3 up = doc.contains("up") ? vec_from_json(doc["up"], "up") : Vec3{0, 1, 0};
  const Vec3 center = bounds(mesh).center();
  const double radius = bounding_radius(mesh, center);
  const Vec3 forward = normalize(look_at - position);
  const double along = dot(center - position, forward);
  const ClipRange clip = fit_clip_range(along, radius);
  const double near_plane = number_or(doc, "near", clip.near_plane);
  const double far_plane = number_or(doc, "far", clip.far_plane);
  return Camera(position, look_at, up, projection, vp, near_plane, far_plane);
}

nlohmann::json camera_to_json(const Camera& camera) {
  nlohmann::json projection;
  if (camera.is_perspective()) {
    projection = {{"type", "perspective"}, {"fov_y_deg", std::get<Perspective>(camera.projection()).fov_y_deg}};
  } else {
    projection = {{"type", "orthographic"}, {"half_height", std::get<Orthographic>(camera.projection()).half_height}};
  }
  return {{"position", vec_to_json(camera.position())},
          {"look_at", vec_to_json(camera.look_at())},
          {"up", vec_to_json(camera.up())},
          {"projection", projection},
          {"viewport", {camera.viewport().width, camera.viewport().height}},
          {"near", camera.near_plane()},
          {"far", camera.far_plane()}};
}

StyleParams params_from_document(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError({{"<document>", "", "JSON object", std::string("malformed JSON: ") + e.what()}});
  }
  ParamsParse parsed = params_from_json(doc);
  if (!parsed.violations.empty()) throw ValidationError(std::move(parsed.violations));
  return parsed.params;
}

StyleParams load_params_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({{"<document>", path.string(), "readable file", "cannot read params file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return params_from_document(ss.str());
}

FixtureScene make_fixture_scene(const std::string& name, Viewport viewport) {
  if (name != "pole") throw std::invalid_argument("unknown fixture '" + name + "'");
  fixtures::PoleOnPlane pole = fixtures::pole_on_plane(1.0, 0.05, 3.0);
  const double aspect = static_cast<double>(viewport.width) / viewport.height;
  const double half_height = pole.plane_half * std::max(1.0, 1.0 / aspect) * 1.02;
  Camera camera({0.0, 10.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, -1.0}, Orthographic{half_height}, viewport, 5.0, 11.0);
  PoleFixtureDescriptor desc{pole.base, pole.height, pole.half_width, pole.plane_y};
  return {std::move(pole.mesh), camera, desc};
}

nlohmann::json timings_to_json(const RenderFrame& frame) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& t : frame.timings) stages.push_back({{"stage", t.stage}, {"ms", t.ms}});
  return {{"stages", stages}, {"total_ms", frame.total_ms()}};
}

RenderService::RenderService(std::filesystem::path mesh_dir) : mesh_dir_(std::move(mesh_dir)) {}

std::vector<std::string> RenderService::mesh_ids() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(mesh_dir_, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj" || ext == ".ply") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

HttpResult RenderService::list_meshes() const { return json_result(200, {{"meshes", mesh_ids()}}); }

HttpResult RenderService::params_schema() const { return json_result(200, npr::params_schema()); }

HttpResult RenderService::last_timings() const {
  std::lock_guard lock(mutex_);
  return json_result(200, last_timings_);
}

std::shared_ptr<RenderService::MeshEntry> RenderService::entry_for(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  auto entry = std::make_shared<MeshEntry>();
  if (id == "fixture:pole") {
    entry->mesh = std::make_shared<const PreparedMesh>(make_fixture_scene("pole").mesh);
  } else {
    std::filesystem::path path;
    for (const char* ext : {".obj", ".ply", ".OBJ", ".PLY"}) {
      const auto candidate = mesh_dir_ / (id + ext);
      if (std::filesystem::exists(candidate)) {
        path = candidate;
        break;
      }
    }
    if (path.empty()) return nullptr;
    entry->mesh = std::make_shared<const PreparedMesh>(load_mesh(path));
  }
  cache_.emplace(id, entry);
  return entry;
}

std::variant<RenderService::Prepared, HttpResult> RenderService::prepare(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    return error_result(400, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) return error_result(400, "request must be a JSON object");
  static const std::vector<std::string> keys{"mesh", "camera", "params", "outputs", "fixture", "shadows"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) return error_result(400, "unknown request key '" + key + "'");
  }

  StyleParams params;
  if (doc.contains("params")) {
    ParamsParse parsed = params_from_json(doc["params"]);
    if (!parsed.violations.empty()) {
      return error_result(400, format_violations(parsed.violations), violations_to_json(parsed.violations));
    }
    params = parsed.params;
  }

  std::vector<std::string> outputs{"final"};
  if (doc.contains("outputs")) {
    if (!doc["outputs"].is_array() || doc["outputs"].empty()) return error_result(400, "outputs must be a non-empty array");
    outputs.clear();
    for (const auto& o : doc["outputs"]) {
      if (!o.is_string()) return error_result(400, "outputs entries must be strings");
      const auto name = o.get<std::string>();
      if (std::find(known_outputs().begin(), known_outputs().end(), name) == known_outputs().end())
        return error_result(400, "unknown output '" + name + "'");
      outputs.push_back(name);
    }
  }

  RenderOptions options;
  if (doc.contains("shadows")) {
    if (!doc["shadows"].is_boolean()) return error_result(400, "shadows must be a boolean");
    options.shadows = doc["shadows"].get<bool>();
  }

  std::string id;
  std::optional<FixtureScene> fixture;
  if (doc.contains("fixture")) {
    if (!doc["fixture"].is_string() || doc["fixture"].get<std::string>() != "pole")
      return error_result(400, "fixture must be \"pole\"");
    id = "fixture:pole";
    fixture = make_fixture_scene("pole");
  } else {
    if (!doc.contains("mesh") || !doc["mesh"].is_string()) return error_result(400, "mesh id is required");
    id = doc["mesh"].get<std::string>();
    const auto ids = mesh_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) return error_result(404, "unknown mesh '" + id + "'");
  }

  std::shared_ptr<MeshEntry> entry;
  try {
    entry = entry_for(id);
  } catch (const std::exception& e) {
    return error_result(500, std::string("mesh load failed: ") + e.what());
  }
  if (!entry) return error_result(404, "unknown mesh '" + id + "'");

  try {
    if (doc.contains("camera")) {
      Camera camera = camera_from_json(doc["camera"], entry->mesh->mesh());
      return Prepared{entry, fixture ? fixture->pole : std::nullopt, camera, params, options, outputs};
    }
    Camera camera = fixture ? fixture->camera : frame_mesh(entry->mesh->mesh(), {512, 512}, 70.0, 20.0);
    return Prepared{entry, fixture ? fixture->pole : std::nullopt, camera, params, options, outputs};
  } catch (const std::exception& e) {
    return error_result(400, std::string("invalid camera: ") + e.what());
  }
}

void RenderService::record_timings(const RenderFrame& frame) {
  std::lock_guard lock(mutex_);
  last_timings_ = timings_to_json(frame);
}

HttpResult RenderService::render(const std::string& body) {
  auto prepared = prepare(body);
  if (auto* err = std::get_if<HttpResult>(&prepared)) return *err;
  auto& req = std::get<Prepared>(prepared);
  try {
    const auto start = std::chrono::steady_clock::now();
    std::lock_guard lock(req.entry->render_mutex);
    const RenderFrame frame = render_frame(*req.entry->mesh, req.camera, req.params, req.options);
    record_timings(frame);
    const auto bytes = buffer_png(frame, req.outputs.front());
    const auto end = std::chrono::steady_clock::now();
    HttpResult r{200, "image/png", std::string(bytes.begin(), bytes.end()), {}};
    r.headers["X-Render-Millis"] = std::to_string(std::chrono::duration<double, std::milli>(end - start).count());
    r.headers["X-Output"] = req.outputs.front();
    return r;
  } catch (const ValidationError& e) {
    return error_result(400, e.what(), violations_to_json(e.violations()));
  } catch (const std::exception& e) {
    return error_result(500, std::string("render failed: ") + e.what());
  }
}

HttpResult RenderService::metrics(const std::string& body) {
  auto prepared = prepare(body);
  if (auto* err = std::get_if<HttpResult>(&prepared)) return *err;
  auto& req = std::get<Prepared>(prepared);
  try {
    std::lock_guard lock(req.entry->render_mutex);
    const RenderFrame frame = render_frame(*req.entry->mesh, req.camera, req.params, req.options);
    record_timings(frame);
    return json_result(200, report_to_json(evaluate_style(frame, req.pole)));
  } catch (const ValidationError& e) {
    return error_result(400, e.what(), violations_to_json(e.violations()));
  } catch (const std::exception& e) {
    return error_result(500, std::string("metrics failed: ") + e.what());
  }
}

void RenderService::bind(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  };
  server.Get("/api/meshes", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, list_meshes()); });
  server.Get("/api/params/schema",
             [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, params_schema()); });
  server.Get("/api/last-timings",
             [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, last_timings()); });
  server.Post("/api/render",
              [this, reply](const httplib::Request& req, httplib::Response& res) { reply(res, render(req.body)); });
  server.Post("/api/metrics",
              [this, reply](const httplib::Request& req, httplib::Response& res) { reply(res, metrics(req.body)); });
}

}  // namespace npr

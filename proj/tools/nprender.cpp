// nprender: command-line front end for the line-drawing renderer.
// Exit codes: 0 ok, 2 bad arguments or params, 3 mesh load failure,
// 4 render failure, 5 a style gate failed.

#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iostream>
#include <optional>

#include "npr/interface.hpp"
#include "npr/parallel.hpp"

namespace {

constexpr int kExitArgs = 2;
constexpr int kExitLoad = 3;
constexpr int kExitRender = 4;
constexpr int kExitGate = 5;

struct SceneArgs {
  std::string mesh;
  std::string params;
  std::string camera;
  std::string fixture = "none";
  int size = 512;
  int threads = 0;
  bool no_shadows = false;
};

struct Loaded {
  npr::Mesh mesh;
  npr::Camera camera;
  npr::StyleParams params;
  std::optional<npr::PoleFixtureDescriptor> pole;
};

class ExitError : public std::runtime_error {
 public:
  ExitError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExitError(kExitArgs, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Loaded load_scene(const SceneArgs& a) {
  npr::StyleParams params;
  if (!a.params.empty()) {
    try {
      params = npr::params_from_document(read_text(a.params));
    } catch (const npr::ValidationError& e) {
      throw ExitError(kExitArgs, npr::format_violations(e.violations()));
    }
  }
  npr::Viewport vp{a.size, a.size};
  std::optional<npr::FixtureScene> fixture;
  npr::Mesh mesh;
  if (a.fixture == "pole") {
    fixture = npr::make_fixture_scene("pole", vp);
    mesh = fixture->mesh;
  } else {
    if (a.mesh.empty()) throw ExitError(kExitArgs, "--mesh is required");
    try {
      mesh = npr::load_mesh(a.mesh);
    } catch (const std::exception& e) {
      throw ExitError(kExitLoad, e.what());
    }
  }
  try {
    if (!a.camera.empty()) {
      // Inline JSON or a path to a JSON file.
      const bool inline_doc = a.camera.find_first_not_of(" \t") != std::string::npos &&
                              a.camera[a.camera.find_first_not_of(" \t")] == '{';
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(inline_doc ? a.camera : read_text(a.camera));
      } catch (const nlohmann::json::parse_error& e) {
        throw ExitError(kExitArgs, std::string("camera file: ") + e.what());
      }
      if (!doc.contains("viewport")) doc["viewport"] = {a.size, a.size};
      npr::Camera cam = npr::camera_from_json(doc, mesh);
      return {std::move(mesh), cam, params, fixture ? fixture->pole : std::nullopt};
    }
    npr::Camera cam = fixture ? fixture->camera : npr::frame_mesh(mesh, vp, 70.0, 20.0);
    return {std::move(mesh), cam, params, fixture ? fixture->pole : std::nullopt};
  } catch (const npr::CameraError& e) {
    throw ExitError(kExitArgs, e.what());
  }
}

npr::RenderFrame render(const Loaded& scene, const SceneArgs& a) {
  try {
    npr::RenderOptions opt;
    opt.shadows = !a.no_shadows;
    return npr::render_frame(scene.mesh, scene.camera, scene.params, opt);
  } catch (const npr::ValidationError& e) {
    throw ExitError(kExitArgs, npr::format_violations(e.violations()));
  } catch (const std::exception& e) {
    throw ExitError(kExitRender, e.what());
  }
}

void add_scene_options(CLI::App* cmd, SceneArgs& a) {
  cmd->add_option("--mesh", a.mesh, "OBJ or PLY mesh");
  cmd->add_option("--params", a.params, "style params JSON");
  cmd->add_option("--camera", a.camera, "camera JSON, inline or as a file path");
  cmd->add_option("--size", a.size, "square viewport size in pixels")->check(CLI::Range(16, 8192));
  cmd->add_option("--threads", a.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--no-shadows", a.no_shadows, "skip the shadow pass");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-drawing style renderer"};
  app.require_subcommand(1);

  SceneArgs render_args;
  std::string out_path;
  std::string dump_dir;
  auto* render_cmd = app.add_subcommand("render", "render a mesh to PNG");
  add_scene_options(render_cmd, render_args);
  render_cmd->add_option("--out", out_path, "output PNG")->required();
  render_cmd->add_option("--dump-intermediates", dump_dir, "write every intermediate buffer here");
  render_cmd->add_option("--fixture", render_args.fixture, "built-in scene instead of --mesh")
      ->check(CLI::IsMember({"pole", "none"}));

  SceneArgs metric_args;
  std::string report_path;
  auto* metrics_cmd = app.add_subcommand("metrics", "render and evaluate the style gates");
  add_scene_options(metrics_cmd, metric_args);
  metrics_cmd->add_option("--report", report_path, "report JSON")->required();
  metrics_cmd->add_option("--fixture", metric_args.fixture, "built-in scene instead of --mesh")
      ->check(CLI::IsMember({"pole", "none"}));

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string mesh_dir = ".";
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP render service");
  serve_cmd->add_option("--port", port)->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--mesh-dir", mesh_dir)->check(CLI::ExistingDirectory);

  std::string fixture_name;
  std::string fixture_out;
  auto* fixture_cmd = app.add_subcommand("fixture", "write a built-in fixture mesh as OBJ");
  fixture_cmd->add_option("name", fixture_name)->required()->check(CLI::IsMember({"pole"}));
  fixture_cmd->add_option("--out", fixture_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitArgs;
  }

  try {
    if (*render_cmd) {
      npr::set_thread_count(render_args.threads);
      const Loaded scene = load_scene(render_args);
      const npr::RenderFrame frame = render(scene, render_args);
      npr::write_file(out_path, npr::final_png(frame));
      if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        const std::filesystem::path dir(dump_dir);
        for (const auto& name : npr::frame_buffer_names()) {
          npr::write_pgm(dir / (name + ".pgm"), npr::frame_buffer(frame, name));
        }
        npr::write_file(dir / "final.png", npr::final_png(frame));
        npr::write_file(dir / "normal_depth.png", npr::buffer_png(frame, "normal_depth"));
        std::ofstream(std::filesystem::path(dump_dir) / "timings.json") << npr::timings_to_json(frame).dump(2) << '\n';
      }
      std::cerr << "rendered " << out_path << " in " << frame.total_ms() << " ms\n";
      return 0;
    }
    if (*metrics_cmd) {
      npr::set_thread_count(metric_args.threads);
      const Loaded scene = load_scene(metric_args);
      const npr::RenderFrame frame = render(scene, metric_args);
      const npr::StyleReport report = npr::evaluate_style(frame, scene.pole);
      std::ofstream out(report_path);
      if (!out) throw ExitError(kExitArgs, "cannot write " + report_path);
      out << npr::report_to_json(report).dump(2) << '\n';
      for (const auto& g : report.gates) std::cout << (g.passed ? "PASS " : "FAIL ") << g.name << ": " << g.detail << '\n';
      return report.passed() ? 0 : kExitGate;
    }
    if (*serve_cmd) {
      npr::RenderService service(mesh_dir);
      httplib::Server server;
      service.bind(server);
      std::cerr << "listening on " << host << ':' << port << '\n';
      if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ':' << port << '\n';
        return kExitArgs;
      }
      return 0;
    }
    if (*fixture_cmd) {
      npr::write_obj(npr::make_fixture_scene(fixture_name).mesh, fixture_out);
      return 0;
    }
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRender;
  }
  return 0;
}

#include <gtest/gtest.h>

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "npr/fixtures.hpp"
#include "npr/interface.hpp"
#include "npr/mesh.hpp"

using namespace npr;
namespace fs = std::filesystem;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "npr_service_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_obj(fixtures::cube(0.5), dir_ / "cube.obj");
    write_obj(fixtures::icosphere(2), dir_ / "ball.obj");
    std::ofstream(dir_ / "broken.obj") << "v 0 0 0\nf 1 2 3\n";
    std::ofstream(dir_ / "notes.txt") << "not a mesh\n";
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static nlohmann::json small_request(const std::string& mesh) {
    return {{"mesh", mesh}, {"camera", {{"viewport", {96, 96}}}}, {"outputs", {"final"}}};
  }

  static fs::path dir_;
};

fs::path ServiceTest::dir_;

int run(const std::string& args) {
  const std::string cmd = std::string(NPRENDER_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_F(ServiceTest, ListsMeshes) {
  RenderService svc(dir_);
  const auto r = svc.list_meshes();
  EXPECT_EQ(r.status, 200);
  const auto doc = nlohmann::json::parse(r.body);
  std::vector<std::string> ids;
  for (const auto& m : doc["meshes"]) ids.push_back(m);
  EXPECT_EQ(ids, (std::vector<std::string>{"ball", "broken", "cube"}));
}

TEST_F(ServiceTest, Schema) {
  RenderService svc(dir_);
  const auto doc = nlohmann::json::parse(svc.params_schema().body);
  EXPECT_EQ(doc["fields"].size(), 22u);
}

TEST_F(ServiceTest, RenderIsDeterministicPng) {
  RenderService svc(dir_);
  const auto a = svc.render(small_request("cube").dump());
  ASSERT_EQ(a.status, 200) << a.body;
  EXPECT_EQ(a.content_type, "image/png");
  EXPECT_EQ(a.body.substr(1, 3), "PNG");
  EXPECT_TRUE(a.headers.count("X-Render-Millis"));
  const auto b = svc.render(small_request("cube").dump());
  EXPECT_EQ(a.body, b.body);

  const auto timings = nlohmann::json::parse(svc.last_timings().body);
  EXPECT_EQ(timings["stages"].size(), 11u);
  EXPECT_GE(timings["total_ms"].get<double>(), 0.0);
}

TEST_F(ServiceTest, RenderRejectsBadRequests) {
  RenderService svc(dir_);
  auto req = small_request("cube");
  req["params"] = {{"w_geom", 0.6}, {"w_nd", 0.7}};
  auto r = svc.render(req.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_NE(r.body.find("weights exceed 1"), std::string::npos);
  EXPECT_FALSE(nlohmann::json::parse(r.body)["violations"].empty());

  EXPECT_EQ(svc.render(small_request("teapot").dump()).status, 404);
  EXPECT_EQ(svc.render(small_request("../cube").dump()).status, 404);
  EXPECT_EQ(svc.render(small_request("broken").dump()).status, 500);
  EXPECT_EQ(svc.render("{not json").status, 400);

  req = small_request("cube");
  req["outputs"] = {"sketch"};
  EXPECT_EQ(svc.render(req.dump()).status, 400);
  req = small_request("cube");
  req["camera"] = {{"viewport", {96, 96}}, {"projection", {{"type", "fisheye"}}}};
  EXPECT_EQ(svc.render(req.dump()).status, 400);
  req = small_request("cube");
  req["colour"] = "blue";
  EXPECT_EQ(svc.render(req.dump()).status, 400);
}

TEST_F(ServiceTest, OtherOutputs) {
  RenderService svc(dir_);
  for (const char* name : {"lines", "shaded", "shadow", "normal_depth"}) {
    auto req = small_request("ball");
    req["outputs"] = {name};
    const auto r = svc.render(req.dump());
    EXPECT_EQ(r.status, 200) << name;
    EXPECT_EQ(r.headers.at("X-Output"), name);
  }
}

TEST_F(ServiceTest, MetricsOnPoleFixture) {
  RenderService svc(dir_);
  const auto r = svc.metrics(nlohmann::json{{"fixture", "pole"}}.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const auto doc = nlohmann::json::parse(r.body);
  EXPECT_EQ(doc["passed"], true) << r.body;
  EXPECT_TRUE(doc["shadow_length_ratio"].is_number());
}

TEST_F(ServiceTest, HttpRoundTrip) {
  RenderService svc(dir_);
  httplib::Server server;
  svc.bind(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto meshes = client.Get("/api/meshes");
  ASSERT_TRUE(meshes);
  EXPECT_EQ(meshes->status, 200);
  auto png = client.Post("/api/render", small_request("cube").dump(), "application/json");
  ASSERT_TRUE(png);
  EXPECT_EQ(png->status, 200);
  EXPECT_EQ(png->get_header_value("Content-Type"), "image/png");
  auto bad = client.Post("/api/render", small_request("nope").dump(), "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 404);
  auto timings = client.Get("/api/last-timings");
  ASSERT_TRUE(timings);
  EXPECT_EQ(timings->status, 200);

  server.stop();
  t.join();
}

TEST(CameraJson, ExplicitAndFramed) {
  const Mesh cube = fixtures::cube(0.5);
  const nlohmann::json doc = {{"position", {0, 0, 5}},
                              {"look_at", {0, 0, 0}},
                              {"up", {0, 1, 0}},
                              {"projection", {{"type", "orthographic"}, {"half_height", 1.5}}},
                              {"viewport", {64, 32}},
                              {"near", 1},
                              {"far", 9}};
  const Camera cam = camera_from_json(doc, cube);
  EXPECT_EQ(cam.viewport().width, 64);
  EXPECT_EQ(cam.viewport().height, 32);
  const auto s = cam.project({0, 0, 0});
  EXPECT_NEAR(s.x, 32.0, 1e-9);
  EXPECT_NEAR(s.y, 16.0, 1e-9);
  const Camera back = camera_from_json(camera_to_json(cam), cube);
  const auto s2 = back.project({0.3, 0.2, 0.1});
  const auto s1 = cam.project({0.3, 0.2, 0.1});
  EXPECT_NEAR(s1.x, s2.x, 1e-9);
  EXPECT_NEAR(s1.y, s2.y, 1e-9);
  EXPECT_NEAR(s1.view_depth, s2.view_depth, 1e-9);

  const Camera framed = camera_from_json({{"viewport", {64, 64}}}, cube);
  for (const auto& v : cube.vertices) {
    const auto p = framed.project(v);
    EXPECT_GT(p.x, 0);
    EXPECT_LT(p.x, 64);
    EXPECT_GT(p.view_depth, 0);
  }
  EXPECT_THROW(camera_from_json({{"viewport", {0, 64}}}, cube), std::exception);
}

TEST(ParamsDocument, Errors) {
  EXPECT_THROW(params_from_document("{bad"), ValidationError);
  EXPECT_THROW(params_from_document(R"({"w_geom": 0.9})"), ValidationError);
  EXPECT_DOUBLE_EQ(params_from_document(R"({"ks": 0.2})").ks, 0.2);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = fs::temp_directory_path() / "npr_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_obj(fixtures::cube(0.5), dir / "cube.obj");
  std::ofstream(dir / "bad.json") << R"({"w_geom": 0.6, "w_nd": 0.7})";
  std::ofstream(dir / "pale.json") << R"({"line_b_min": 0.1})";
  const std::string d = dir.string();

  EXPECT_EQ(run("render --mesh " + d + "/cube.obj --out " + d + "/cube.png --size 128"), 0);
  EXPECT_TRUE(fs::exists(dir / "cube.png"));
  EXPECT_EQ(run("render --mesh " + d + "/missing.obj --out " + d + "/x.png"), 3);
  EXPECT_EQ(run("render --mesh " + d + "/cube.obj --out " + d + "/x.png --params " + d + "/bad.json"), 2);
  EXPECT_EQ(run("render --out " + d + "/x.png --frobnicate"), 2);
  EXPECT_EQ(run("render --mesh " + d + "/cube.obj --out " + d + "/d.png --size 64 --dump-intermediates " + d + "/dump"),
            0);
  EXPECT_TRUE(fs::exists(dir / "dump" / "timings.json"));
  EXPECT_EQ(run("metrics --fixture pole --report " + d + "/report.json"), 0);
  EXPECT_EQ(run("metrics --fixture pole --params " + d + "/pale.json --report " + d + "/pale_report.json"), 5);
  EXPECT_EQ(run("fixture pole --out " + d + "/pole.obj"), 0);
  EXPECT_NO_THROW(load_mesh(dir / "pole.obj"));
  fs::remove_all(dir);
}

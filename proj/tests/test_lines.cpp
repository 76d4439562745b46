#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "npr/contour.hpp"
#include "npr/fixtures.hpp"
#include "npr/lines.hpp"
#include "npr/pipeline.hpp"
#include "oracles.hpp"

using namespace npr;

namespace {

NormalDepthMap uniform_map(int w, int h, const Vec3& n, double d) {
  return NormalDepthMap(w, h, pack_normal_depth(n, d));
}

LineImage random_image(int w, int h, std::mt19937& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  LineImage img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = u(rng);
  return img;
}

}  // namespace

TEST(NdEdges, UniformMapIsZero) {
  const auto out = detect_nd_edges(uniform_map(16, 12, {0, 0, 1}, 0.4), 6.0, 0.5);
  for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out[i], 0.0f);
}

TEST(NdEdges, DepthStepHandEvaluation) {
  // 4x4, columns 0-1 at depth code 40, columns 2-3 at code 80
  const double d0 = 40.0 / 255.0;
  const double d1 = 80.0 / 255.0;
  NormalDepthMap nd(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) nd.at(x, y) = pack_normal_depth({0, 0, 1}, x < 2 ? d0 : d1);
  }
  const double step = unpack_normal_depth(nd.at(3, 0)).depth - unpack_normal_depth(nd.at(0, 0)).depth;
  const double k = 0.5;
  const auto out = detect_nd_edges(nd, k, 0.5);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      // sampling columns x-1 and x+1 (clamped) straddle the step only for x = 1 and x = 2
      const double want = (x == 1 || x == 2) ? k * 2.0 * step : 0.0;
      EXPECT_NEAR(out.at(x, y), want, 1e-6) << x << "," << y;
    }
  }
  // the default weight saturates the same step
  const auto sat = detect_nd_edges(nd, 6.0, 0.5);
  EXPECT_FLOAT_EQ(sat.at(1, 1), 1.0f);
}

TEST(NdEdges, TwoNormalCrease) {
  // left half faces +x-ish, right half +z-ish, same depth: response only along the boundary
  const Vec3 a = normalize(Vec3{-1, 0, 1});
  const Vec3 b = normalize(Vec3{1, 0, 1});
  NormalDepthMap nd(10, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 10; ++x) nd.at(x, y) = pack_normal_depth(x < 5 ? a : b, 0.3);
  }
  const auto out = detect_nd_edges(nd, 6.0, 0.5);
  const auto na = unpack_normal_depth(nd.at(0, 0)).normal;
  const auto nb = unpack_normal_depth(nd.at(9, 0)).normal;
  const double want = std::min(1.0, 0.5 * 2.0 * length(na - nb));
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 10; ++x) {
      if (x == 4 || x == 5) {
        EXPECT_NEAR(out.at(x, y), want, 1e-6);
      } else {
        EXPECT_EQ(out.at(x, y), 0.0f);
      }
    }
  }
}

TEST(NdEdges, RejectsNegativeWeights) {
  EXPECT_THROW(detect_nd_edges(uniform_map(4, 4, {0, 0, 1}, 0.1), -1.0, 0.5), std::invalid_argument);
}

TEST(Blur, RadiusZeroIsIdentity) {
  std::mt19937 rng(1);
  const auto img = random_image(20, 13, rng);
  EXPECT_TRUE(blur(img, 0) == img);
}

TEST(Blur, SinglePixelSpreadsToNinths) {
  LineImage img(7, 7, 0.0f);
  img.at(3, 3) = 1.0f;
  const auto out = blur(img, 1);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) {
      const bool inside = std::abs(x - 3) <= 1 && std::abs(y - 3) <= 1;
      EXPECT_NEAR(out.at(x, y), inside ? 1.0 / 9.0 : 0.0, 1e-7);
    }
  }
}

TEST(Blur, MatchesDenseConvolution) {
  std::mt19937 rng(2);
  for (int r : {1, 2, 3}) {
    const auto img = random_image(41, 29, rng);
    const auto got = blur(img, r);
    const auto want = oracle::dense_box(img, r, false);
    for (std::size_t i = 0; i < img.size(); ++i) ASSERT_NEAR(got[i], want[i], 1e-6);
  }
}

TEST(Blur, ConservesInteriorMass) {
  LineImage img(64, 64, 0.0f);
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int y = 10; y < 54; ++y) {
    for (int x = 10; x < 54; ++x) img.at(x, y) = u(rng);
  }
  double before = 0.0, after = 0.0;
  const auto out = blur(img, 2);
  for (std::size_t i = 0; i < img.size(); ++i) {
    before += img[i];
    after += out[i];
  }
  EXPECT_NEAR(after, before, 0.005 * before);
}

TEST(Composite, Examples) {
  LineImage one(3, 3, 1.0f), zero(3, 3, 0.0f);
  EXPECT_NEAR(composite_lines(one, zero, 0.3, 0.7, 0).at(1, 1), 0.3, 1e-7);
  EXPECT_NEAR(composite_lines(zero, one, 0.3, 0.7, 0).at(1, 1), 0.7, 1e-7);
  EXPECT_EQ(composite_lines(zero, zero, 0.3, 0.7, 0).at(1, 1), 0.0f);
}

TEST(Composite, ChecksDimensionsAndWeights) {
  LineImage a(3, 3), b(4, 3);
  EXPECT_THROW(composite_lines(a, b, 0.3, 0.7, 0), DimensionError);
  EXPECT_THROW(composite_lines(a, a, 0.6, 0.7, 0), std::invalid_argument);
}

TEST(Composite, Superposition) {
  std::mt19937 rng(4);
  auto small = [&](int w, int h) {
    auto img = random_image(w, h, rng);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] *= 0.4f;
    return img;
  };
  const auto g1 = small(30, 20), g2 = small(30, 20), n1 = small(30, 20), n2 = small(30, 20);
  LineImage gs(30, 20), ns(30, 20);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    gs[i] = g1[i] + g2[i];
    ns[i] = n1[i] + n2[i];
  }
  const auto sum = composite_lines(gs, ns, 0.3, 0.7, 1);
  const auto a = composite_lines(g1, n1, 0.3, 0.7, 1);
  const auto b = composite_lines(g2, n2, 0.3, 0.7, 1);
  for (std::size_t i = 0; i < sum.size(); ++i) ASSERT_NEAR(sum[i], a[i] + b[i], 1.0 / 255.0);
}

TEST(Remap, Examples) {
  EXPECT_NEAR(remap_line_value(1.0, 0.05, 0.4, 0.8), 0.4, 1e-12);
  EXPECT_NEAR(remap_line_value(0.05 + 1e-9, 0.05, 0.4, 0.8), 0.8, 1e-6);
  EXPECT_LT(remap_line_value(0.05 + 1e-9, 0.05, 0.4, 0.8), 0.8);
  EXPECT_EQ(remap_line_value(0.0, 0.05, 0.4, 0.8), 1.0);
  EXPECT_EQ(remap_line_value(0.05, 0.05, 0.4, 0.8), 1.0);
}

TEST(Remap, StrictlyDecreasingAndBanded) {
  LineImage d(1000, 1);
  for (int i = 0; i < 1000; ++i) d.at(i, 0) = static_cast<float>(i / 999.0);
  const auto v = remap_line_brightness(d, 0.05, 0.4, 0.8);
  double previous = 2.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = v.at(i, 0);
    if (d.at(i, 0) <= 0.05f) {
      EXPECT_EQ(x, 1.0);
      continue;
    }
    EXPECT_GE(x, 0.4 - 1e-7);
    EXPECT_LE(x, 0.8);
    EXPECT_LT(x, previous);
    previous = x;
  }
}

TEST(Composite, GapClosure) {
  // Drop one visible geometry segment of the cube outline; the nd lines must still cover it.
  const Mesh cube = fixtures::cube(0.5);
  const PreparedMesh prepared(cube);
  const Camera cam = frame_mesh(cube, {512, 512}, 70, 20);
  StyleParams params;
  const auto frame = render_frame(prepared, cam, params);
  ASSERT_FALSE(frame.segments.empty());

  std::map<std::uint32_t, EdgeCandidate> by_id;
  for (const auto& c : to_candidates(frame.edges, prepared.adjacency())) by_id[c.id] = c;
  // longest silhouette segment
  std::size_t victim = 0;
  double longest = 0.0;
  for (std::size_t i = 0; i < frame.segments.size(); ++i) {
    const auto& s = frame.segments[i];
    const auto& c = by_id[s.edge];
    const double len = std::abs(cam.project(cube.vertices[c.v0]).x - cam.project(cube.vertices[c.v1]).x) +
                       std::abs(cam.project(cube.vertices[c.v0]).y - cam.project(cube.vertices[c.v1]).y);
    if (len > longest) {
      longest = len;
      victim = i;
    }
  }
  std::vector<VisibleSegment> kept = frame.segments;
  const VisibleSegment removed = kept[victim];
  kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(victim));
  std::vector<EdgeCandidate> cands;
  for (const auto& [id, c] : by_id) cands.push_back(c);
  const auto geom = render_geometry_lines(kept, cands, cube, cam, params.geometry_line_darkness);
  const auto comp = composite_lines(geom, frame.nd_lines, params.w_geom, params.w_nd, params.blur_radius_px);

  // walk the removed segment; count runs of pixels with zero composite darkness where nd covers it
  const auto& c = by_id[removed.edge];
  const auto a = cam.project(lerp(cube.vertices[c.v0], cube.vertices[c.v1], removed.t0));
  const auto b = cam.project(lerp(cube.vertices[c.v0], cube.vertices[c.v1], removed.t1));
  const int steps = static_cast<int>(std::ceil(std::max(std::abs(b.x - a.x), std::abs(b.y - a.y))));
  int run = 0, worst = 0, covered = 0;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const int x = std::clamp(static_cast<int>(a.x + (b.x - a.x) * t), 0, 511);
    const int y = std::clamp(static_cast<int>(a.y + (b.y - a.y) * t), 0, 511);
    if (frame.nd_lines.at(x, y) <= 0.0f) continue;
    ++covered;
    run = comp.at(x, y) > 0.0f ? 0 : run + 1;
    worst = std::max(worst, run);
  }
  EXPECT_GE(covered, 0.9 * steps);
  EXPECT_LE(worst, 2);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles/brute_force_paths.hpp"
#include "uavrt/raytracer.hpp"
#include "uavrt/scenario.hpp"

using namespace uavrt;

namespace {

Scene random_scene(std::mt19937_64& rng, int max_boxes) {
  std::uniform_real_distribution<double> pos(-45.0, 25.0), size(8.0, 20.0), height(10.0, 40.0);
  std::uniform_int_distribution<int> count(1, max_boxes);
  std::vector<Building> blds;
  const int n = count(rng);
  for (int tries = 0; static_cast<int>(blds.size()) < n && tries < 1000; ++tries) {
    const double x = pos(rng), y = pos(rng);
    Aabb box{{x, y, 0.0}, {x + size(rng), y + size(rng), height(rng)}};
    bool clash = false;
    for (const auto& b : blds) clash = clash || box.footprint_overlaps(b.box);
    if (!clash) blds.push_back({box, "concrete"});
  }
  return Scene(120.0, 120.0, SurfaceKind::Ground, 0.0, "wet_earth", std::move(blds));
}

Vec3 free_point(const Scene& scene, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> xy(-55.0, 55.0), z(0.5, 35.0);
  for (;;) {
    const Vec3 p{xy(rng), xy(rng), z(rng)};
    bool inside = false;
    for (const auto& b : scene.buildings()) inside = inside || b.box.contains(p, 1e-3);
    if (!inside) return p;
  }
}

std::vector<double> lengths(const std::vector<PropagationPath>& paths) {
  std::vector<double> v;
  for (const auto& p : paths) v.push_back(p.total_length);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Trace, EmptySceneHasLosAndGroundBounce) {
  const Scene scene(10000, 10000, SurfaceKind::Ground, 0, "wet_earth", {});
  const auto paths = trace_all(scene, {0, 0, 2}, {40, 0, 150});
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[0].bounce_count(), 0u);
  EXPECT_NEAR(paths[0].total_length, 153.3101431738944, 1e-10);
  EXPECT_EQ(paths[1].bounce_count(), 1u);
  EXPECT_NEAR(paths[1].total_length, 157.175061635108, 1e-10);
  // reflection point divides D in the ratio h_t : h_r
  EXPECT_NEAR(paths[1].vertices[1].x, 40.0 * 2.0 / 152.0, 1e-12);
  EXPECT_EQ(paths[1].vertices[1].z, 0.0);
}

TEST(Trace, OrderZeroIsLosOnly) {
  const Scene scene(10000, 10000, SurfaceKind::Ground, 0, "wet_earth", {});
  TraceConfig cfg;
  cfg.max_reflection_order = 0;
  EXPECT_EQ(trace_all(scene, {0, 0, 2}, {40, 0, 150}, cfg).size(), 1u);
  cfg.max_reflection_order = 4;
  EXPECT_THROW(trace_all(scene, {0, 0, 2}, {40, 0, 150}, cfg), std::invalid_argument);
  EXPECT_THROW(trace_los(scene, {1, 1, 1}, {1, 1, 1}), std::invalid_argument);
}

TEST(Trace, WallReflectionAndBlockedLos) {
  // wall parallel to the x axis at y = 10 facing -y
  const Scene scene(1000, 1000, SurfaceKind::Ground, 0, "wet_earth", {{{{0, 10, 0}, {100, 20, 50}}, "concrete"}});
  TraceConfig cfg;
  cfg.include_ground_bounce = false;
  cfg.max_reflection_order = 1;
  const auto paths = trace_all(scene, {10, 0, 5}, {90, 0, 5}, cfg);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[1].surfaces.front(), SurfaceRef::building_face(0, 2));
  EXPECT_NEAR(paths[1].total_length, std::hypot(80.0, 20.0), 1e-12);
  EXPECT_NEAR(paths[1].vertices[1].y, 10.0, 0.0);

  // receiver hidden behind the box: no LOS
  const auto hidden = trace_all(scene, {50, -10, 5}, {50, 40, 5});
  for (const auto& p : hidden) EXPECT_FALSE(p.surfaces.empty()) << "unexpected LOS";
}

TEST(Trace, PathsObeyTheLawOfReflection) {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const Scene scene = random_scene(rng, 3);
    const Vec3 tx = free_point(scene, rng), rx = free_point(scene, rng);
    TraceConfig cfg;
    cfg.max_reflection_order = 3;
    for (const auto& p : trace_all(scene, tx, rx, cfg)) {
      EXPECT_LT(specular_residual(p, scene), 1e-9);
      EXPECT_NEAR(p.total_length, polyline_length(p.vertices), 1e-12);
      for (std::size_t k = 0; k < p.surfaces.size(); ++k) {
        const AxisPlane pl = scene.plane_of(p.surfaces[k]);
        EXPECT_EQ(p.vertices[k + 1][pl.axis], pl.offset);
        EXPECT_TRUE(scene.surface_contains(p.surfaces[k], p.vertices[k + 1]));
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 400);
}

TEST(Trace, MatchesBruteForceEnumerator) {
  std::mt19937_64 rng(21);
  std::size_t building_paths = 0;
  for (int i = 0; i < 150; ++i) {
    const Scene scene = random_scene(rng, 3);
    const Vec3 tx = free_point(scene, rng), rx = free_point(scene, rng);
    const int order = 1 + i % 2;
    TraceConfig cfg;
    cfg.max_reflection_order = order;
    auto mine = trace_all(scene, tx, rx, cfg);
    auto ref = oracle::enumerate_paths(scene, tx, rx, order);
    std::sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) { return a.surfaces < b.surfaces; });
    std::sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
    ASSERT_EQ(mine.size(), ref.size()) << "scene " << i;
    for (std::size_t k = 0; k < mine.size(); ++k) {
      EXPECT_EQ(mine[k].surfaces, ref[k].seq);
      EXPECT_NEAR(mine[k].total_length, ref[k].length, 1e-9);
      building_paths += mine[k].surfaces.size() > 1 || (mine[k].surfaces.size() == 1 && !mine[k].surfaces[0].is_reflecting_surface());
    }
  }
  EXPECT_GT(building_paths, 30u);
}

TEST(Trace, ThirdOrderMatchesBruteForceOnAFewScenes) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 15; ++i) {
    const Scene scene = random_scene(rng, 2);
    const Vec3 tx = free_point(scene, rng), rx = free_point(scene, rng);
    TraceConfig cfg;
    cfg.max_reflection_order = 3;
    auto mine = trace_all(scene, tx, rx, cfg);
    auto ref = oracle::enumerate_paths(scene, tx, rx, 3);
    ASSERT_EQ(mine.size(), ref.size()) << "scene " << i;
    std::sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) { return a.surfaces < b.surfaces; });
    std::sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
    for (std::size_t k = 0; k < mine.size(); ++k) EXPECT_EQ(mine[k].surfaces, ref[k].seq);
  }
}

TEST(Trace, ReciprocityOfPathLengths) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Scene scene = random_scene(rng, 3);
    const Vec3 a = free_point(scene, rng), b = free_point(scene, rng);
    const auto ab = lengths(trace_all(scene, a, b)), ba = lengths(trace_all(scene, b, a));
    ASSERT_EQ(ab.size(), ba.size());
    for (std::size_t k = 0; k < ab.size(); ++k) EXPECT_NEAR(ab[k], ba[k], 1e-9);
  }
}

TEST(Trace, HigherOrderIsASuperset) {
  ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::DenseUrban, 4);
  spec.terrain_extent = 1000.0;
  const Scene scene = build_scene(spec);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> xy(-480, 480), z(1, 200);
  for (int i = 0; i < 10; ++i) {
    const Vec3 tx{0, 0, 2};
    Vec3 rx;
    do rx = {xy(rng), 0.0, z(rng)};
    while (std::any_of(scene.buildings().begin(), scene.buildings().end(), [&](const Building& b) { return b.box.contains(rx); }));
    std::vector<std::vector<SurfaceRef>> prev;
    for (int order = 0; order <= 2; ++order) {
      TraceConfig cfg;
      cfg.max_reflection_order = order;
      std::vector<std::vector<SurfaceRef>> cur;
      for (const auto& p : trace_all(scene, tx, rx, cfg)) {
        EXPECT_LE(static_cast<int>(p.bounce_count()), order);
        cur.push_back(p.surfaces);
      }
      std::sort(cur.begin(), cur.end());
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = std::move(cur);
    }
  }
}

TEST(Trace, OutputIsSortedByLengthWithLosFirst) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const Scene scene = random_scene(rng, 3);
    const auto paths = trace_all(scene, free_point(scene, rng), free_point(scene, rng));
    for (std::size_t k = 1; k < paths.size(); ++k) EXPECT_LE(paths[k - 1].total_length, paths[k].total_length);
    for (std::size_t k = 1; k < paths.size(); ++k) EXPECT_FALSE(paths[k].surfaces.empty());
  }
}

TEST(Trace, WithoutGroundBounceNoPathTouchesTheSurface) {
  std::mt19937_64 rng(13);
  TraceConfig cfg;
  cfg.include_ground_bounce = false;
  for (int i = 0; i < 50; ++i) {
    const Scene scene = random_scene(rng, 3);
    for (const auto& p : trace_all(scene, free_point(scene, rng), free_point(scene, rng), cfg))
      for (const auto& s : p.surfaces) EXPECT_FALSE(s.is_reflecting_surface());
  }
}

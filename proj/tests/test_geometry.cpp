#include <gtest/gtest.h>

#include <random>

#include "oracles/brute_force_paths.hpp"
#include "oracles/naive_box.hpp"
#include "uavrt/geometry.hpp"

using namespace uavrt;

namespace {

Scene one_box_scene() {
  return Scene(200.0, 200.0, SurfaceKind::Ground, 0.0, "wet_earth", {{{{10, -5, 0}, {20, 5, 30}}, "concrete"}});
}

}  // namespace

TEST(Vec3, BasicAlgebra) {
  const Vec3 a{1, 2, 3}, b{-2, 0.5, 4};
  EXPECT_EQ(a + b, (Vec3{-1, 2.5, 7}));
  EXPECT_EQ(a - b, (Vec3{3, 1.5, -1}));
  EXPECT_DOUBLE_EQ(dot(a, b), -2 + 1 + 12);
  EXPECT_DOUBLE_EQ(dot(cross(a, b), a), 0.0);
  EXPECT_DOUBLE_EQ(dot(cross(a, b), b), 0.0);
  EXPECT_DOUBLE_EQ(norm(Vec3{3, 4, 12}), 13.0);
  EXPECT_NEAR(norm(normalized(b)), 1.0, 1e-15);
}

TEST(Vec3, AngleBetweenIsAccurateNearZeroAndPi) {
  EXPECT_NEAR(angle_between({1, 0, 0}, {0, 1, 0}), kPi / 2, 1e-15);
  EXPECT_NEAR(angle_between({1, 0, 0}, {1, 1e-9, 0}), 1e-9, 1e-20);
  EXPECT_NEAR(angle_between({1, 0, 0}, {-1, 1e-9, 0}), kPi - 1e-9, 1e-15);
}

TEST(RayAabb, MatchesFaceByFaceOracleOnTenThousandRays) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0), s(0.1, 6.0);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 lo{u(rng), u(rng), u(rng)};
    const Aabb box{lo, lo + Vec3{s(rng), s(rng), s(rng)}};
    const Vec3 o{u(rng) * 2, u(rng) * 2, u(rng) * 2};
    Vec3 d = normalized({u(rng), u(rng), u(rng)});
    // every other ray is aimed roughly at the box so both outcomes are common
    if (i % 2 == 0) d = normalized((box.min_corner + box.max_corner) * 0.5 - o + d * 2.0);
    const auto mine = ray_aabb_intersect(o, d, box);
    const auto ref = oracle::ray_box_by_faces(o, d, box);
    ASSERT_EQ(mine.has_value(), ref.has_value()) << "ray " << i;
    if (!mine) continue;
    ++hits;
    EXPECT_NEAR(mine->t_near, ref->t_near, 1e-9 * (1 + std::abs(ref->t_near)));
    EXPECT_NEAR(mine->t_far, ref->t_far, 1e-9 * (1 + std::abs(ref->t_far)));
  }
  EXPECT_GT(hits, 3000);
  EXPECT_LT(hits, 9000);
}

TEST(RayAabb, AxisParallelRays) {
  const Aabb box{{0, 0, 0}, {1, 1, 1}};
  auto h = ray_aabb_intersect({-1, 0.5, 0.5}, {1, 0, 0}, box);
  ASSERT_TRUE(h);
  EXPECT_DOUBLE_EQ(h->t_near, 1.0);
  EXPECT_DOUBLE_EQ(h->t_far, 2.0);
  EXPECT_FALSE(ray_aabb_intersect({-1, 2, 0.5}, {1, 0, 0}, box));
  // box entirely behind the origin
  EXPECT_FALSE(ray_aabb_intersect({3, 0.5, 0.5}, {1, 0, 0}, box));
  // origin inside
  h = ray_aabb_intersect({0.5, 0.5, 0.5}, {0, 0, 1}, box);
  ASSERT_TRUE(h);
  EXPECT_LT(h->t_near, 0.0);
  EXPECT_DOUBLE_EQ(h->t_far, 0.5);
}

TEST(Occlusion, SegmentThroughBoxIsBlocked) {
  const Scene scene = one_box_scene();
  EXPECT_TRUE(segment_occluded({0, 0, 10}, {30, 0, 10}, scene));
  EXPECT_FALSE(segment_occluded({0, 0, 40}, {30, 0, 40}, scene));
  EXPECT_FALSE(segment_occluded({0, 10, 10}, {30, 10, 10}, scene));
}

TEST(Occlusion, GrazingContactIsNotBlocking) {
  const Scene scene = one_box_scene();
  // along a face, along an edge, and ending on a face
  EXPECT_FALSE(segment_occluded({0, 5, 10}, {30, 5, 10}, scene));
  EXPECT_FALSE(segment_occluded({0, 5, 30}, {30, 5, 30}, scene));
  EXPECT_FALSE(segment_occluded({0, 0, 10}, {10, 0, 10}, scene));
  EXPECT_FALSE(segment_occluded({10, 0, 10}, {0, 3, 1}, scene));
}

TEST(Occlusion, BelowSurfaceIsBlockedUnlessIgnored) {
  const Scene scene = one_box_scene();
  EXPECT_TRUE(segment_occluded({0, 0, 1}, {-5, 0, -1}, scene));
  EXPECT_FALSE(segment_occluded({0, 0, 1}, {-5, 0, 0}, scene));
  const SurfaceRef ignore[] = {SurfaceRef::reflecting_surface()};
  EXPECT_FALSE(segment_occluded({0, 0, 1}, {-5, 0, -1}, scene, ignore));
}

TEST(Occlusion, SymmetricAndMatchesClipOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xy(-20, 40), z(0, 45);
  const Scene scene = one_box_scene();
  int blocked = 0;
  for (int i = 0; i < 5000; ++i) {
    const Vec3 a{xy(rng), xy(rng), z(rng)}, b{xy(rng), xy(rng), z(rng)};
    const bool ab = segment_occluded(a, b, scene);
    EXPECT_EQ(ab, segment_occluded(b, a, scene));
    EXPECT_EQ(ab, oracle::blocked(a, b, scene)) << i;
    blocked += ab;
  }
  EXPECT_GT(blocked, 100);
}

TEST(Mirror, IsAnInvolution) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p{u(rng), u(rng), u(rng)};
    const AxisPlane plane{static_cast<int>(rng() % 3), u(rng)};
    const Vec3 q = mirror_point(p, plane);
    const Vec3 back = mirror_point(q, plane);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(back[a], p[a], 1e-12);
    EXPECT_NEAR(signed_distance(q, plane), -signed_distance(p, plane), 1e-12);
  }
  EXPECT_EQ(mirror_point(Vec3{1, 2, 7}, Plane{2.0}), (Vec3{1, 2, -3}));
}

TEST(Faces, IndexRoundTripAndNormals) {
  for (int f = 0; f < 6; ++f) EXPECT_EQ(BoxFace::from_index(f).index(), f);
  EXPECT_EQ(face_outward_normal(BoxFace::from_index(0)), (Vec3{-1, 0, 0}));
  EXPECT_EQ(face_outward_normal(BoxFace::from_index(5)), (Vec3{0, 0, 1}));
  const Aabb box{{0, 0, 0}, {2, 3, 4}};
  EXPECT_DOUBLE_EQ(face_plane(box, BoxFace::from_index(3)).offset, 3.0);
  EXPECT_TRUE(face_contains(box, BoxFace::from_index(0), {0, 3, 4}));
  EXPECT_FALSE(face_contains(box, BoxFace::from_index(0), {0, 3.1, 4}));
}

TEST(Scene, RejectsBrokenLayouts) {
  EXPECT_THROW(Scene(0, 10, SurfaceKind::Ground, 0, "wet_earth", {}), std::invalid_argument);
  // floating box
  EXPECT_THROW(Scene(100, 100, SurfaceKind::Ground, 0, "wet_earth", {{{{0, 0, 1}, {1, 1, 2}}, "concrete"}}),
               std::invalid_argument);
  // overlapping footprints
  EXPECT_THROW(Scene(100, 100, SurfaceKind::Ground, 0, "wet_earth",
                     {{{{0, 0, 0}, {5, 5, 2}}, "concrete"}, {{{4, 4, 0}, {8, 8, 2}}, "concrete"}}),
               std::invalid_argument);
  // outside the terrain
  EXPECT_THROW(Scene(10, 10, SurfaceKind::Ground, 0, "wet_earth", {{{{4, 4, 0}, {6, 6, 2}}, "concrete"}}),
               std::invalid_argument);
  // touching footprints are fine
  EXPECT_NO_THROW(Scene(100, 100, SurfaceKind::Ground, 0, "wet_earth",
                        {{{{0, 0, 0}, {5, 5, 2}}, "concrete"}, {{{5, 0, 0}, {8, 5, 2}}, "concrete"}}));
}

TEST(Scene, ReflectorsSkipBottomFaces) {
  const Scene scene = one_box_scene();
  const auto r = scene.reflectors();
  ASSERT_EQ(r.size(), 6u);
  EXPECT_TRUE(r.front().is_reflecting_surface());
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_NE(r[i].face, 4);
}

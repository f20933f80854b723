#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uavrt {

/// Slack used for point-on-plane and containment tests (meters).
inline constexpr double kGeomEps = 1e-9;

/// Two path vertices closer than this are treated as the same point.
inline constexpr double kMinSegmentLength = 1e-6;

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(b - a); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  assert(n > 0.0);
  return v * (1.0 / n);
}

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Angle between two nonzero vectors, radians in [0, pi].
inline double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate near 0 and pi
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

/// Axis-aligned plane {p : p[axis] == offset}.
struct AxisPlane {
  int axis{2};
  double offset{0.0};
};

inline double signed_distance(const Vec3& p, const AxisPlane& plane) { return p[plane.axis] - plane.offset; }

/// Horizontal reflecting surface (ground or sea top). Normal is +z.
struct Plane {
  double anchor_z{0.0};

  static constexpr Vec3 normal() { return {0.0, 0.0, 1.0}; }
  constexpr AxisPlane as_axis_plane() const { return {2, anchor_z}; }

  friend constexpr bool operator==(const Plane&, const Plane&) = default;
};

struct Aabb {
  Vec3 min_corner;
  Vec3 max_corner;

  bool valid() const {
    return is_finite(min_corner) && is_finite(max_corner) && min_corner.x <= max_corner.x &&
           min_corner.y <= max_corner.y && min_corner.z <= max_corner.z;
  }

  bool contains(const Vec3& p, double eps = kGeomEps) const {
    for (int a = 0; a < 3; ++a) {
      if (p[a] < min_corner[a] - eps || p[a] > max_corner[a] + eps) return false;
    }
    return true;
  }

  /// Footprints (x/y extents) overlap with at least `gap` separation violated.
  bool footprint_overlaps(const Aabb& o, double gap = 0.0) const {
    return min_corner.x < o.max_corner.x + gap && o.min_corner.x < max_corner.x + gap &&
           min_corner.y < o.max_corner.y + gap && o.min_corner.y < max_corner.y + gap;
  }

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

/// One face of a box. Face index encodes axis = index / 2 and side = index % 2
/// (0 = min side, outward normal -axis; 1 = max side, outward normal +axis).
struct BoxFace {
  int axis{0};
  bool max_side{false};

  static constexpr BoxFace from_index(int index) { return {index / 2, index % 2 == 1}; }
  constexpr int index() const { return axis * 2 + (max_side ? 1 : 0); }
};

inline AxisPlane face_plane(const Aabb& box, BoxFace face) {
  return {face.axis, face.max_side ? box.max_corner[face.axis] : box.min_corner[face.axis]};
}

inline Vec3 face_outward_normal(BoxFace face) {
  Vec3 n{};
  n[face.axis] = face.max_side ? 1.0 : -1.0;
  return n;
}

/// Closed-rectangle test for a point already on the face plane.
inline bool face_contains(const Aabb& box, BoxFace face, const Vec3& p, double eps = kGeomEps) {
  for (int a = 0; a < 3; ++a) {
    if (a == face.axis) continue;
    if (p[a] < box.min_corner[a] - eps || p[a] > box.max_corner[a] + eps) return false;
  }
  return true;
}

struct HitInterval {
  double t_near{0.0};
  double t_far{0.0};
};

/// Slab test. `direction` must be unit length. Returns the parametric interval
/// of the ray line inside the box when t_far > 0.
inline std::optional<HitInterval> ray_aabb_intersect(const Vec3& origin, const Vec3& direction, const Aabb& box) {
  assert(std::abs(norm(direction) - 1.0) < 1e-9);
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double o = origin[a];
    const double d = direction[a];
    if (d == 0.0) {
      if (o < box.min_corner[a] || o > box.max_corner[a]) return std::nullopt;
      continue;
    }
    double t0 = (box.min_corner[a] - o) / d;
    double t1 = (box.max_corner[a] - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  if (t_near > t_far || t_far <= 0.0) return std::nullopt;
  return HitInterval{t_near, t_far};
}

/// Length-parametrized overlap of the open segment (a, b) with the strict
/// interior of `box`. A segment lying in a face or touching an edge has zero
/// overlap.
inline double segment_interior_overlap(const Vec3& a, const Vec3& b, const Aabb& box) {
  const Vec3 d = b - a;
  double s0 = 0.0;
  double s1 = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = box.min_corner[ax] + kGeomEps;
    const double hi = box.max_corner[ax] - kGeomEps;
    if (lo >= hi) return 0.0;
    if (std::abs(d[ax]) < 1e-300) {
      if (a[ax] <= lo || a[ax] >= hi) return 0.0;
      continue;
    }
    double t0 = (lo - a[ax]) / d[ax];
    double t1 = (hi - a[ax]) / d[ax];
    if (t0 > t1) std::swap(t0, t1);
    s0 = std::max(s0, t0);
    s1 = std::min(s1, t1);
    if (s0 >= s1) return 0.0;
  }
  return (s1 - s0) * norm(d);
}

/// Identifies a reflecting surface of a scene: the horizontal reflecting
/// surface, or one face of a building.
struct SurfaceRef {
  static constexpr int kSurface = -1;

  int building{kSurface};
  int face{0};

  static constexpr SurfaceRef reflecting_surface() { return {kSurface, 0}; }
  static constexpr SurfaceRef building_face(int b, int f) { return {b, f}; }

  constexpr bool is_reflecting_surface() const { return building == kSurface; }

  friend constexpr bool operator==(const SurfaceRef&, const SurfaceRef&) = default;
  friend constexpr auto operator<=>(const SurfaceRef&, const SurfaceRef&) = default;
};

enum class SurfaceKind { Ground, Sea };

struct Building {
  Aabb box;
  std::string material;

  friend bool operator==(const Building&, const Building&) = default;
};

/// Reflecting surface plus box buildings. Immutable once built; all queries
/// are const and safe to share across threads.
class Scene {
 public:
  Scene() = default;

  Scene(double extent_x, double extent_y, SurfaceKind kind, double surface_z, std::string surface_material,
        std::vector<Building> buildings)
      : extent_x_(extent_x),
        extent_y_(extent_y),
        kind_(kind),
        surface_{surface_z},
        surface_material_(std::move(surface_material)),
        buildings_(std::move(buildings)) {
    validate();
  }

  double extent_x() const { return extent_x_; }
  double extent_y() const { return extent_y_; }
  SurfaceKind surface_kind() const { return kind_; }
  const Plane& surface() const { return surface_; }
  const std::string& surface_material() const { return surface_material_; }
  std::span<const Building> buildings() const { return buildings_; }

  /// Terrain is centered on the origin.
  bool within_terrain(const Vec3& p, double eps = kGeomEps) const {
    return std::abs(p.x) <= 0.5 * extent_x_ + eps && std::abs(p.y) <= 0.5 * extent_y_ + eps;
  }

  AxisPlane plane_of(SurfaceRef s) const {
    if (s.is_reflecting_surface()) return surface_.as_axis_plane();
    return face_plane(buildings_[static_cast<std::size_t>(s.building)].box, BoxFace::from_index(s.face));
  }

  Vec3 outward_normal_of(SurfaceRef s) const {
    if (s.is_reflecting_surface()) return Plane::normal();
    return face_outward_normal(BoxFace::from_index(s.face));
  }

  /// Point lying on the plane of `s` is inside the surface's finite extent.
  bool surface_contains(SurfaceRef s, const Vec3& p) const {
    if (s.is_reflecting_surface()) return within_terrain(p);
    return face_contains(buildings_[static_cast<std::size_t>(s.building)].box, BoxFace::from_index(s.face), p);
  }

  const std::string& material_of(SurfaceRef s) const {
    if (s.is_reflecting_surface()) return surface_material_;
    return buildings_[static_cast<std::size_t>(s.building)].material;
  }

  /// All surfaces a path may reflect from: the reflecting surface first, then
  /// every building face except the bottom (which rests on the surface).
  std::vector<SurfaceRef> reflectors() const {
    std::vector<SurfaceRef> out;
    out.reserve(1 + 5 * buildings_.size());
    out.push_back(SurfaceRef::reflecting_surface());
    for (std::size_t b = 0; b < buildings_.size(); ++b) {
      for (int f = 0; f < 6; ++f) {
        if (f == BoxFace{2, false}.index()) continue;
        out.push_back(SurfaceRef::building_face(static_cast<int>(b), f));
      }
    }
    return out;
  }

  friend bool operator==(const Scene&, const Scene&) = default;

 private:
  void validate() const;

  double extent_x_{10000.0};
  double extent_y_{10000.0};
  SurfaceKind kind_{SurfaceKind::Ground};
  Plane surface_{};
  std::string surface_material_{"wet_earth"};
  std::vector<Building> buildings_;
};

inline void Scene::validate() const {
  if (!(extent_x_ > 0.0) || !(extent_y_ > 0.0)) throw std::invalid_argument("scene: terrain extent must be positive");
  if (!std::isfinite(surface_.anchor_z)) throw std::invalid_argument("scene: surface height must be finite");
  for (std::size_t i = 0; i < buildings_.size(); ++i) {
    const Aabb& b = buildings_[i].box;
    if (!b.valid()) throw std::invalid_argument("scene: building " + std::to_string(i) + " has an invalid box");
    if (std::abs(b.min_corner.z - surface_.anchor_z) > kGeomEps)
      throw std::invalid_argument("scene: building " + std::to_string(i) + " does not rest on the reflecting surface");
    if (!within_terrain(b.min_corner) || !within_terrain(b.max_corner))
      throw std::invalid_argument("scene: building " + std::to_string(i) + " leaves the terrain");
    for (std::size_t j = 0; j < i; ++j) {
      if (b.footprint_overlaps(buildings_[j].box))
        throw std::invalid_argument("scene: buildings " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
    }
  }
}

/// Reflection of `p` across an axis-aligned plane.
inline Vec3 mirror_point(const Vec3& p, const AxisPlane& plane) {
  Vec3 q = p;
  q[plane.axis] = 2.0 * plane.offset - p[plane.axis];
  return q;
}

inline Vec3 mirror_point(const Vec3& p, const Plane& plane) { return mirror_point(p, plane.as_axis_plane()); }

/// True iff the open segment (a, b) passes through the interior of a building
/// or dips below the reflecting surface. Touching a face, edge, or the surface
/// itself does not count. Listing the reflecting surface in `ignore` skips the
/// surface check; box faces need no listing because reflection points sit on
/// their faces and never reach a box interior.
inline bool segment_occluded(const Vec3& a, const Vec3& b, const Scene& scene, std::span<const SurfaceRef> ignore = {}) {
  assert(!(a == b));
  const bool ignore_surface =
      std::find(ignore.begin(), ignore.end(), SurfaceRef::reflecting_surface()) != ignore.end();
  if (!ignore_surface) {
    const double z0 = scene.surface().anchor_z;
    if (std::min(a.z, b.z) < z0 - kGeomEps) return true;
  }
  for (const Building& bld : scene.buildings()) {
    if (segment_interior_overlap(a, b, bld.box) > kGeomEps) return true;
  }
  return false;
}

}  // namespace uavrt

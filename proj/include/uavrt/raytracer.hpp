#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavrt/geometry.hpp"

namespace uavrt {

/// Specular path from tx to rx. `vertices` holds tx, the reflection points in
/// order, and rx; `surfaces[i]` is the surface hit at vertices[i + 1].
struct PropagationPath {
  std::vector<Vec3> vertices;
  std::vector<SurfaceRef> surfaces;
  double total_length{0.0};

  std::size_t bounce_count() const { return surfaces.size(); }
  const Vec3& tx() const { return vertices.front(); }
  const Vec3& rx() const { return vertices.back(); }

  /// Unit direction leaving the transmitter.
  Vec3 departure_direction() const { return normalized(vertices[1] - vertices[0]); }
  /// Unit direction from the receiver back toward the last vertex.
  Vec3 arrival_direction() const { return normalized(vertices[vertices.size() - 2] - vertices.back()); }
};

inline double polyline_length(const std::vector<Vec3>& v) {
  double len = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) len += distance(v[i - 1], v[i]);
  return len;
}

struct TraceConfig {
  static constexpr int kMaxOrderLimit = 3;

  int max_reflection_order{2};
  bool include_ground_bounce{true};

  void validate() const {
    if (max_reflection_order < 0 || max_reflection_order > kMaxOrderLimit)
      throw std::invalid_argument("max_reflection_order must be in [0, 3]");
  }
};

/// Largest deviation from the law of reflection over the bounces of `path`
/// (radians): for each bounce, the angle between the mirrored incoming
/// direction and the outgoing direction.
inline double specular_residual(const PropagationPath& path, const Scene& scene) {
  double worst = 0.0;
  for (std::size_t i = 0; i < path.surfaces.size(); ++i) {
    const Vec3& p = path.vertices[i + 1];
    const Vec3 in = p - path.vertices[i];
    const Vec3 out = path.vertices[i + 2] - p;
    const Vec3 n = scene.outward_normal_of(path.surfaces[i]);
    const Vec3 mirrored = in - 2.0 * dot(in, n) * n;
    worst = std::max(worst, angle_between(mirrored, out));
  }
  return worst;
}

namespace detail {

/// True when every leg of the polyline is unoccluded and non-degenerate.
inline bool legs_clear(const std::vector<Vec3>& v, const Scene& scene) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (distance(v[i - 1], v[i]) < kMinSegmentLength) return false;
    if (segment_occluded(v[i - 1], v[i], scene)) return false;
  }
  return true;
}

/// Image-method construction for one surface sequence. Returns the path when
/// every reflection point lands on its surface with both neighbours in front
/// of it and no leg is blocked.
inline std::optional<PropagationPath> image_path(const Scene& scene, const Vec3& tx, const Vec3& rx,
                                                 std::span<const SurfaceRef> seq) {
  constexpr std::size_t kMax = TraceConfig::kMaxOrderLimit;
  const std::size_t k = seq.size();
  if (k == 0 || k > kMax) return std::nullopt;

  std::array<AxisPlane, kMax> planes{};
  std::array<double, kMax> sides{};  // +1 / -1: outward normal along the plane axis
  for (std::size_t j = 0; j < k; ++j) {
    planes[j] = scene.plane_of(seq[j]);
    sides[j] = scene.outward_normal_of(seq[j])[planes[j].axis];
  }
  auto front = [&](const Vec3& p, std::size_t j) { return signed_distance(p, planes[j]) * sides[j]; };
  if (!(front(rx, k - 1) > kGeomEps) || !(front(tx, 0) > kGeomEps)) return std::nullopt;

  // Successive images of the transmitter.
  std::array<Vec3, kMax + 1> images{};
  images[0] = tx;
  for (std::size_t j = 0; j < k; ++j) images[j + 1] = mirror_point(images[j], planes[j]);

  std::array<Vec3, kMax + 2> verts{};
  verts[0] = tx;
  verts[k + 1] = rx;
  Vec3 target = rx;
  for (std::size_t j = k; j-- > 0;) {
    const double d_img = front(images[j + 1], j);
    const double d_tgt = front(target, j);
    // image behind the plane, target strictly in front
    if (!(d_img < -kGeomEps) || !(d_tgt > kGeomEps)) return std::nullopt;
    const double t = d_tgt / (d_tgt - d_img);
    Vec3 p = target + t * (images[j + 1] - target);
    p[planes[j].axis] = planes[j].offset;
    if (!scene.surface_contains(seq[j], p)) return std::nullopt;
    verts[j + 1] = p;
    target = p;
  }
  // the point preceding each reflection must also be in front of it
  for (std::size_t j = 1; j < k; ++j) {
    if (!(front(verts[j], j) > kGeomEps)) return std::nullopt;
  }

  std::vector<Vec3> poly(verts.begin(), verts.begin() + static_cast<std::ptrdiff_t>(k + 2));
  if (!legs_clear(poly, scene)) return std::nullopt;

  PropagationPath path;
  path.total_length = polyline_length(poly);
  path.vertices = std::move(poly);
  path.surfaces.assign(seq.begin(), seq.end());
  return path;
}

}  // namespace detail

inline std::optional<PropagationPath> trace_los(const Scene& scene, const Vec3& tx, const Vec3& rx) {
  if (tx == rx) throw std::invalid_argument("trace_los: tx and rx coincide");
  if (segment_occluded(tx, rx, scene)) return std::nullopt;
  PropagationPath p;
  p.vertices = {tx, rx};
  p.total_length = distance(tx, rx);
  return p;
}

/// Single bounce off the reflecting surface (the ground-reflected component).
inline std::optional<PropagationPath> trace_surface_bounce(const Scene& scene, const Vec3& tx, const Vec3& rx) {
  const SurfaceRef seq[1] = {SurfaceRef::reflecting_surface()};
  return detail::image_path(scene, tx, rx, seq);
}

/// All valid specular paths with 1..max order bounces that touch at least one
/// building face. Sequences mixing building faces and the reflecting surface
/// are included; pure surface sequences are not (see trace_surface_bounce).
inline std::vector<PropagationPath> trace_building_paths(const Scene& scene, const Vec3& tx, const Vec3& rx,
                                                         const TraceConfig& cfg) {
  cfg.validate();
  std::vector<PropagationPath> out;
  if (scene.buildings().empty()) return out;

  std::vector<SurfaceRef> reflectors = scene.reflectors();
  if (!cfg.include_ground_bounce) std::erase(reflectors, SurfaceRef::reflecting_surface());

  // Faces the transmitter / receiver cannot see from the front never start /
  // end a sequence; cheap rejection before the image construction.
  auto in_front = [&](const SurfaceRef& s, const Vec3& p) {
    const AxisPlane pl = scene.plane_of(s);
    return signed_distance(p, pl) * scene.outward_normal_of(s)[pl.axis] > kGeomEps;
  };

  std::vector<SurfaceRef> seq;
  auto rec = [&](auto&& self, int depth) -> void {
    for (const SurfaceRef& s : reflectors) {
      if (!seq.empty() && seq.back() == s) continue;
      if (seq.empty() && !in_front(s, tx)) continue;
      seq.push_back(s);
      const bool has_building = std::any_of(seq.begin(), seq.end(), [](const SurfaceRef& r) { return !r.is_reflecting_surface(); });
      if (has_building && in_front(s, rx)) {
        if (auto p = detail::image_path(scene, tx, rx, seq)) out.push_back(std::move(*p));
      }
      if (depth + 1 < cfg.max_reflection_order) self(self, depth + 1);
      seq.pop_back();
    }
  };
  if (cfg.max_reflection_order > 0) rec(rec, 0);
  return out;
}

/// LOS, surface bounce and building paths, sorted by length (LOS first when
/// present). Ties keep surface-sequence order.
inline std::vector<PropagationPath> trace_all(const Scene& scene, const Vec3& tx, const Vec3& rx,
                                              const TraceConfig& cfg = {}) {
  cfg.validate();
  std::vector<PropagationPath> out;
  if (auto los = trace_los(scene, tx, rx)) out.push_back(std::move(*los));
  if (cfg.include_ground_bounce && cfg.max_reflection_order >= 1) {
    if (auto grc = trace_surface_bounce(scene, tx, rx)) out.push_back(std::move(*grc));
  }
  auto bld = trace_building_paths(scene, tx, rx, cfg);
  out.insert(out.end(), std::make_move_iterator(bld.begin()), std::make_move_iterator(bld.end()));
  std::stable_sort(out.begin(), out.end(), [](const PropagationPath& a, const PropagationPath& b) {
    if (a.total_length != b.total_length) return a.total_length < b.total_length;
    return std::lexicographical_compare(a.surfaces.begin(), a.surfaces.end(), b.surfaces.begin(), b.surfaces.end());
  });
  return out;
}

}  // namespace uavrt

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uavrt/geometry.hpp"

namespace uavrt {

enum class ScenarioKind { OverSea, Rural, Suburban, DenseUrban };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::OverSea: return "over_sea";
    case ScenarioKind::Rural: return "rural";
    case ScenarioKind::Suburban: return "suburban";
    case ScenarioKind::DenseUrban: return "dense_urban";
  }
  return "?";
}

inline ScenarioKind parse_scenario_kind(std::string_view s) {
  if (s == "over_sea") return ScenarioKind::OverSea;
  if (s == "rural") return ScenarioKind::Rural;
  if (s == "suburban") return ScenarioKind::Suburban;
  if (s == "dense_urban") return ScenarioKind::DenseUrban;
  throw std::invalid_argument("unknown scenario '" + std::string(s) + "' (over_sea|rural|suburban|dense_urban)");
}

struct Range {
  double min{0.0};
  double max{0.0};

  friend bool operator==(const Range&, const Range&) = default;
};

struct ScenarioSpec {
  ScenarioKind kind{ScenarioKind::DenseUrban};
  int building_count{100};
  Range height_range{70.0, 180.0};
  Range footprint_range{20.0, 50.0};  // per side
  double street_gap{5.0};
  double terrain_extent{10000.0};
  double sea_depth{10.0};
  double corridor_half_width{5.0};
  std::uint64_t seed{1};
  int max_attempts_per_building{10000};

  /// Deployment parameters per environment. Footprints and gaps are not part
  /// of the published table and are configurable.
  static ScenarioSpec defaults(ScenarioKind kind, std::uint64_t seed = 1) {
    ScenarioSpec s;
    s.kind = kind;
    s.seed = seed;
    switch (kind) {
      case ScenarioKind::OverSea:
        s.building_count = 0;
        s.height_range = {0.0, 0.0};
        s.footprint_range = {0.0, 0.0};
        s.street_gap = 0.0;
        break;
      case ScenarioKind::Rural:
        s.building_count = 10;
        s.height_range = {4.0, 8.0};
        s.footprint_range = {10.0, 25.0};
        s.street_gap = 0.0;
        break;
      case ScenarioKind::Suburban:
        s.building_count = 20;
        s.height_range = {4.0, 30.0};
        s.footprint_range = {10.0, 25.0};
        s.street_gap = 0.0;
        break;
      case ScenarioKind::DenseUrban:
        s.building_count = 100;
        s.height_range = {70.0, 180.0};
        s.footprint_range = {20.0, 50.0};
        s.street_gap = 5.0;
        break;
    }
    return s;
  }

  void validate() const {
    if (building_count < 0) throw std::invalid_argument("building_count must be >= 0");
    if (!(terrain_extent > 0.0)) throw std::invalid_argument("terrain_extent must be positive");
    if (building_count > 0) {
      if (!(height_range.min > 0.0) || height_range.max < height_range.min)
        throw std::invalid_argument("height range must satisfy 0 < min <= max");
      if (!(footprint_range.min > 0.0) || footprint_range.max < footprint_range.min)
        throw std::invalid_argument("footprint range must satisfy 0 < min <= max");
    }
    if (street_gap < 0.0 || corridor_half_width < 0.0) throw std::invalid_argument("gaps must be >= 0");
    if (kind == ScenarioKind::OverSea && building_count != 0)
      throw std::invalid_argument("over-sea scenario has no buildings");
  }
};

/// Straight, constant-height UAV trajectory receding from the transmitter
/// along +x. Heights are above the reflecting surface.
struct TrajectorySpec {
  double tx_height{2.0};
  std::vector<double> rx_heights{2.0, 50.0, 100.0, 150.0};
  double start_horizontal_offset{40.0};
  double length{1200.0};
  double speed{15.0};
  double sample_spacing{10.0};

  double end_offset() const { return start_horizontal_offset + length; }

  std::size_t point_count() const { return static_cast<std::size_t>(std::floor(length / sample_spacing + 1e-9)) + 1; }

  void validate() const {
    if (!(tx_height > 0.0)) throw std::invalid_argument("tx_height must be positive");
    if (!(start_horizontal_offset > 0.0)) throw std::invalid_argument("start offset must be positive");
    if (!(length >= 0.0)) throw std::invalid_argument("trajectory length must be >= 0");
    if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
    if (!(sample_spacing > 0.0)) throw std::invalid_argument("sample_spacing must be positive");
    for (double h : rx_heights)
      if (!(h > 0.0)) throw std::invalid_argument("rx heights must be positive");
  }
};

struct TrajectoryPoint {
  int index{0};
  double time{0.0};
  Vec3 position{};
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reflecting-surface height for a scenario: the sea top sits `sea_depth`
/// above the terrain.
inline double surface_height(const ScenarioSpec& spec) { return spec.kind == ScenarioKind::OverSea ? spec.sea_depth : 0.0; }

inline Vec3 transmitter_position(const TrajectorySpec& traj, double surface_z) { return {0.0, 0.0, surface_z + traj.tx_height}; }

inline std::vector<TrajectoryPoint> sample_trajectory(const TrajectorySpec& spec, double height, double surface_z = 0.0) {
  spec.validate();
  if (!(height > 0.0)) throw std::invalid_argument("rx height must be positive");
  std::vector<TrajectoryPoint> pts;
  const std::size_t n = spec.point_count();
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double along = static_cast<double>(i) * spec.sample_spacing;
    pts.push_back({static_cast<int>(i), along / spec.speed,
                   {spec.start_horizontal_offset + along, 0.0, surface_z + height}});
  }
  return pts;
}

/// Footprint kept free of buildings so the direct and ground-reflected paths
/// exist along the whole trajectory.
inline Aabb los_corridor(const ScenarioSpec& spec, const TrajectorySpec& traj) {
  const double w = spec.corridor_half_width;
  const double z = surface_height(spec);
  return {{-w, -w, z}, {traj.end_offset() + w, w, z}};
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, Range r) { return r.min + (r.max - r.min) * unit_uniform(rng); }

}  // namespace detail

/// Seeded placement of non-overlapping box buildings on the terrain.
inline Scene build_scene(const ScenarioSpec& spec, const TrajectorySpec& traj = {}) {
  spec.validate();
  traj.validate();
  const double z0 = surface_height(spec);
  const double half = 0.5 * spec.terrain_extent;
  const SurfaceKind kind = spec.kind == ScenarioKind::OverSea ? SurfaceKind::Sea : SurfaceKind::Ground;
  const std::string surface_material = kind == SurfaceKind::Sea ? "sea_water" : "wet_earth";
  const Aabb corridor = los_corridor(spec, traj);

  std::mt19937_64 rng(spec.seed);
  std::vector<Building> buildings;
  buildings.reserve(static_cast<std::size_t>(spec.building_count));
  for (int i = 0; i < spec.building_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_attempts_per_building && !placed; ++attempt) {
      const double w = detail::uniform(rng, spec.footprint_range);
      const double d = detail::uniform(rng, spec.footprint_range);
      const double h = detail::uniform(rng, spec.height_range);
      const double x0 = detail::uniform(rng, {-half, half - w});
      const double y0 = detail::uniform(rng, {-half, half - d});
      Aabb box{{x0, y0, z0}, {x0 + w, y0 + d, z0 + h}};
      if (box.footprint_overlaps(corridor)) continue;
      bool clash = false;
      for (const Building& b : buildings) {
        if (box.footprint_overlaps(b.box, spec.street_gap)) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      buildings.push_back({box, "concrete"});
      placed = true;
    }
    if (!placed)
      throw ScenarioError("could not place building " + std::to_string(i) + " after " +
                          std::to_string(spec.max_attempts_per_building) + " attempts");
  }
  return Scene(spec.terrain_extent, spec.terrain_extent, kind, z0, surface_material, std::move(buildings));
}

}  // namespace uavrt

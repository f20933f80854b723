#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uavrt/antenna.hpp"
#include "uavrt/geometry.hpp"
#include "uavrt/materials.hpp"
#include "uavrt/raytracer.hpp"

namespace uavrt {

enum class Persistence { LOS, GRC, NonPersistent };

inline const char* to_string(Persistence p) {
  switch (p) {
    case Persistence::LOS: return "LOS";
    case Persistence::GRC: return "GRC";
    case Persistence::NonPersistent: return "NonPersistent";
  }
  return "?";
}

/// One resolved multipath component. Elevations are zenith angles (0 = up,
/// 90 = horizontal), azimuths counterclockwise from +x in [0, 360).
struct Mpc {
  double power_dbm{-std::numeric_limits<double>::infinity()};
  double amplitude_linear{0.0};  // sqrt(P / 1 mW)
  double phase{0.0};             // radians in [0, 2 pi)
  double toa{0.0};               // seconds
  double dod_az{0.0};
  double dod_el{0.0};
  double doa_az{0.0};
  double doa_el{0.0};
  int bounce_count{0};
  Persistence persistence{Persistence::NonPersistent};

  friend bool operator==(const Mpc&, const Mpc&) = default;
};

struct Snapshot {
  int index{0};
  double time{0.0};
  Vec3 rx_pos{};
  std::vector<Mpc> mpcs;

  std::size_t mpc_count() const { return mpcs.size(); }
};

struct LinkBudget {
  double tx_power_dbm{30.0};
  double sensitivity_dbm{-110.0};
  CarrierSpec carrier{};

  void validate() const {
    if (!(carrier.frequency > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
    if (!(tx_power_dbm > sensitivity_dbm)) throw std::invalid_argument("tx power must exceed the sensitivity");
  }
};

/// Everything besides geometry needed to turn a path into an MPC.
struct RadioSetup {
  LinkBudget budget{};
  AntennaPair antennas{};
  MaterialTable materials{MaterialTable::defaults()};
};

/// Direction angles in degrees under the zenith / counterclockwise convention.
struct DirectionAngles {
  double azimuth_deg{0.0};
  double elevation_deg{0.0};
};

inline constexpr double kRadToDeg = 180.0 / kPi;

inline DirectionAngles direction_angles(const Vec3& d) {
  DirectionAngles a;
  a.elevation_deg = angle_between(d, Vec3{0.0, 0.0, 1.0}) * kRadToDeg;
  double az = std::atan2(d.y, d.x) * kRadToDeg;
  if (az < 0.0) az += 360.0;
  if (az >= 360.0) az -= 360.0;
  a.azimuth_deg = az;
  return a;
}

inline double wrap_two_pi(double x) {
  double r = std::fmod(x, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

/// Grazing angle (radians) of each bounce of `path`.
inline std::vector<double> bounce_grazing_angles(const PropagationPath& path, const Scene& scene) {
  std::vector<double> out;
  out.reserve(path.surfaces.size());
  for (std::size_t i = 0; i < path.surfaces.size(); ++i) {
    const Vec3 in = normalized(path.vertices[i + 1] - path.vertices[i]);
    const double s = std::abs(dot(in, scene.outward_normal_of(path.surfaces[i])));
    out.push_back(std::asin(std::min(1.0, s)));
  }
  return out;
}

/// Fresnel branch for a vertically polarized wave: the TE (perpendicular)
/// branch when the vertical field lies mostly across the plane of incidence,
/// TM (parallel) otherwise. Horizontal surfaces always give TM.
inline Polarization incidence_branch(const Vec3& incoming, const Vec3& normal) {
  const Vec3 te = cross(incoming, normal);
  const double len = norm(te);
  if (len < 1e-12) return normal.z != 0.0 ? Polarization::Parallel : Polarization::Perpendicular;
  return std::abs(te.z) / len >= std::sqrt(0.5) ? Polarization::Perpendicular : Polarization::Parallel;
}

inline Persistence classify_persistence(const PropagationPath& path) {
  if (path.surfaces.empty()) return Persistence::LOS;
  if (path.surfaces.size() == 1 && path.surfaces.front().is_reflecting_surface()) return Persistence::GRC;
  return Persistence::NonPersistent;
}

/// Power, phase, delay and angles of one path.
inline Mpc synthesize_mpc(const PropagationPath& path, const Scene& scene, const RadioSetup& radio) {
  const CarrierSpec& carrier = radio.budget.carrier;
  Mpc m;
  m.bounce_count = static_cast<int>(path.bounce_count());
  m.persistence = classify_persistence(path);

  double reflection_db = 0.0;
  double reflection_phase = 0.0;
  const std::vector<double> grazing = bounce_grazing_angles(path, scene);
  for (std::size_t i = 0; i < path.surfaces.size(); ++i) {
    const Vec3 in = path.vertices[i + 1] - path.vertices[i];
    const Vec3 n = scene.outward_normal_of(path.surfaces[i]);
    const Material& mat = radio.materials.at(scene.material_of(path.surfaces[i]));
    const std::complex<double> gamma = fresnel_reflection(grazing[i], mat, incidence_branch(in, n));
    reflection_db += 20.0 * std::log10(std::abs(gamma));
    reflection_phase += std::arg(gamma);
  }

  const Vec3 dep = path.departure_direction();
  const Vec3 arr = path.arrival_direction();
  const double g = DipolePattern::pattern_gain(dep) * DipolePattern::pattern_gain(arr);

  m.power_dbm = radio.budget.tx_power_dbm + radio.antennas.tx.peak_gain_dbi + radio.antennas.rx.peak_gain_dbi +
                to_db(free_space_gain(path.total_length, carrier)) + reflection_db + to_db(g);
  m.amplitude_linear = std::isfinite(m.power_dbm) ? std::sqrt(from_db(m.power_dbm)) : 0.0;

  const double cycles = path.total_length / carrier.wavelength();
  m.phase = wrap_two_pi(2.0 * kPi * (cycles - std::floor(cycles)) + reflection_phase);
  m.toa = path.total_length / kSpeedOfLight;

  const DirectionAngles d = direction_angles(dep);
  const DirectionAngles a = direction_angles(arr);
  m.dod_az = d.azimuth_deg;
  m.dod_el = d.elevation_deg;
  m.doa_az = a.azimuth_deg;
  m.doa_el = a.elevation_deg;
  return m;
}

/// Keeps MPCs at or above the sensitivity, in order.
inline std::vector<Mpc> apply_sensitivity(std::vector<Mpc> mpcs, const LinkBudget& budget) {
  std::erase_if(mpcs, [&](const Mpc& m) { return !(m.power_dbm >= budget.sensitivity_dbm); });
  return mpcs;
}

inline Snapshot snapshot_from_paths(const std::vector<PropagationPath>& paths, const Scene& scene,
                                    const RadioSetup& radio, int index, double time, const Vec3& rx_pos) {
  Snapshot snap;
  snap.index = index;
  snap.time = time;
  snap.rx_pos = rx_pos;
  std::vector<Mpc> mpcs;
  mpcs.reserve(paths.size());
  for (const PropagationPath& p : paths) mpcs.push_back(synthesize_mpc(p, scene, radio));
  snap.mpcs = apply_sensitivity(std::move(mpcs), radio.budget);
  std::stable_sort(snap.mpcs.begin(), snap.mpcs.end(), [](const Mpc& a, const Mpc& b) { return a.toa < b.toa; });
  return snap;
}

/// Closed-form two-ray world used as a reference.
struct TwoRayResult {
  Mpc los;
  Mpc grc;
  double los_length{0.0};
  double grc_length{0.0};
  double grazing_angle{0.0};  // radians
};

/// Direct and surface-reflected components for a transmitter at height h_t
/// and a receiver at height h_r (both above the reflecting surface) separated
/// horizontally by D along +x. No ray tracing involved.
inline TwoRayResult two_ray_oracle(double h_t, double h_r, double D, const RadioSetup& radio, SurfaceKind kind,
                                   const Material& surface_material) {
  if (!(h_t > 0.0) || !(h_r > 0.0) || !(D > 0.0)) throw std::domain_error("two_ray_oracle: heights and D must be positive");
  TwoRayResult r;
  const double dh = h_r - h_t;
  r.los_length = std::sqrt(D * D + dh * dh);
  r.grc_length = std::sqrt(D * D + (h_t + h_r) * (h_t + h_r));
  r.grazing_angle = grazing_angle(h_t, h_r, D);

  const double lambda = radio.budget.carrier.wavelength();
  const double base = radio.budget.tx_power_dbm + radio.antennas.tx.peak_gain_dbi + radio.antennas.rx.peak_gain_dbi;
  const double los_elev = std::atan(dh / D);  // above horizon, seen from tx

  r.los.persistence = Persistence::LOS;
  r.los.bounce_count = 0;
  r.los.toa = r.los_length / kSpeedOfLight;
  r.los.dod_az = 0.0;
  r.los.doa_az = 180.0;
  r.los.dod_el = 90.0 - los_elev * kRadToDeg;
  r.los.doa_el = 90.0 + los_elev * kRadToDeg;
  const double g_los = pattern_gain(kPi / 2 - los_elev) * pattern_gain(kPi / 2 + los_elev);
  r.los.power_dbm = base + 20.0 * std::log10(lambda / (4.0 * kPi * r.los_length)) + 10.0 * std::log10(g_los);
  r.los.amplitude_linear = std::sqrt(std::pow(10.0, r.los.power_dbm / 10.0));
  r.los.phase = wrap_two_pi(2.0 * kPi * radio.budget.carrier.frequency * r.los_length / kSpeedOfLight);

  const double psi = r.grazing_angle;
  const std::complex<double> gamma = fresnel_reflection(psi, surface_material, Polarization::Parallel);
  const double surface_power = kind == SurfaceKind::Sea ? sea_layer_loss(kind, surface_material, psi) : std::norm(gamma);
  r.grc.persistence = Persistence::GRC;
  r.grc.bounce_count = 1;
  r.grc.toa = r.grc_length / kSpeedOfLight;
  r.grc.dod_az = 0.0;
  r.grc.doa_az = 180.0;
  r.grc.dod_el = 90.0 + psi * kRadToDeg;
  r.grc.doa_el = 90.0 + psi * kRadToDeg;
  const double g_grc = pattern_gain(kPi / 2 + psi) * pattern_gain(kPi / 2 + psi);
  r.grc.power_dbm = base + 20.0 * std::log10(lambda / (4.0 * kPi * r.grc_length)) + 10.0 * std::log10(g_grc) +
                    10.0 * std::log10(surface_power);
  r.grc.amplitude_linear = std::sqrt(std::pow(10.0, r.grc.power_dbm / 10.0));
  r.grc.phase = wrap_two_pi(2.0 * kPi * radio.budget.carrier.frequency * r.grc_length / kSpeedOfLight + std::arg(gamma));
  return r;
}

}  // namespace uavrt

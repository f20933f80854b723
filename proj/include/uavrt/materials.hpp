#pragma once

#include <cmath>
#include <complex>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavrt/geometry.hpp"

namespace uavrt {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Relative permittivity eps' - j eps''. The imaginary part folds in the
/// conductivity at the carrier frequency.
struct Material {
  std::string name;
  double rel_permittivity_real{1.0};
  double rel_permittivity_imag{0.0};

  std::complex<double> permittivity() const { return {rel_permittivity_real, -rel_permittivity_imag}; }

  bool valid() const {
    return std::isfinite(rel_permittivity_real) && std::isfinite(rel_permittivity_imag) &&
           rel_permittivity_real >= 1.0 && rel_permittivity_imag >= 0.0;
  }

  friend bool operator==(const Material&, const Material&) = default;
};

struct CarrierSpec {
  double frequency{2.8e10};

  double wavelength() const { return kSpeedOfLight / frequency; }
};

enum class Polarization { Parallel, Perpendicular };

/// free_space_gain(d) = (lambda / (4 pi d))^2.
inline double free_space_gain(double d, const CarrierSpec& carrier) {
  if (!(d > 0.0) || !std::isfinite(d)) throw std::domain_error("free_space_gain: distance must be positive");
  const double r = carrier.wavelength() / (4.0 * kPi * d);
  return r * r;
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Reference-amplitude power law P = alpha_ref^2 * beta^gamma with
/// beta = (4 pi d / lambda)^-1. Misalignment is applied by the caller.
struct PathGainModel {
  double alpha_ref{1.0};
  double gamma{2.0};
  CarrierSpec carrier{};

  double power(double d) const {
    if (!(d > 0.0)) throw std::domain_error("PathGainModel: distance must be positive");
    const double beta = carrier.wavelength() / (4.0 * kPi * d);
    return alpha_ref * alpha_ref * std::pow(beta, gamma);
  }
};

/// Fresnel reflection coefficient of a half-space with complex permittivity,
/// for an incident wave at `grazing_angle` above the surface.
/// Parallel = TM (E in the plane of incidence), Perpendicular = TE.
inline std::complex<double> fresnel_reflection(double grazing_angle, const Material& material, Polarization pol) {
  if (!(grazing_angle > 0.0) || grazing_angle > kPi / 2.0 + 1e-12)
    throw std::domain_error("fresnel_reflection: grazing angle must lie in (0, pi/2]");
  const std::complex<double> eps = material.permittivity();
  const double s = std::sin(grazing_angle);
  const double c = std::cos(grazing_angle);
  const std::complex<double> root = std::sqrt(eps - c * c);
  if (pol == Polarization::Parallel) return (eps * s - root) / (eps * s + root);
  return (s - root) / (s + root);
}

/// Grazing angle of the surface-reflected ray of the two-ray geometry.
inline double grazing_angle(double h_t, double h_r, double horizontal_distance) {
  if (!(h_t > 0.0) || !(h_r > 0.0) || !(horizontal_distance > 0.0))
    throw std::domain_error("grazing_angle: heights and distance must be positive");
  return std::atan((h_t + h_r) / horizontal_distance);
}

/// Power factor of the GRC contributed by the surface. Over ground there is
/// no sea layer (1); over sea it is |Gamma_sea|^2 for vertical polarization,
/// i.e. the loss relative to a perfectly reflecting surface.
inline double sea_layer_loss(SurfaceKind kind, const Material& sea, double grazing) {
  if (kind == SurfaceKind::Ground) return 1.0;
  return std::norm(fresnel_reflection(grazing, sea, Polarization::Parallel));
}

/// Name -> material lookup. Defaults are ITU-R P.2040-style values at 28 GHz.
class MaterialTable {
 public:
  MaterialTable() = default;

  static MaterialTable defaults() {
    MaterialTable t;
    t.add({"concrete", 5.31, 0.48});
    t.add({"wet_earth", 15.0, 2.3});
    t.add({"sea_water", 20.0, 30.0});
    return t;
  }

  void add(Material m) {
    if (!m.valid()) throw std::invalid_argument("material '" + m.name + "': needs eps' >= 1 and eps'' >= 0");
    const std::string key = m.name;
    by_name_[key] = std::move(m);
  }

  const Material& at(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::out_of_range("unknown material '" + name + "'");
    return it->second;
  }

  bool contains(const std::string& name) const { return by_name_.count(name) != 0; }
  std::size_t size() const { return by_name_.size(); }

  std::vector<Material> materials() const {
    std::vector<Material> out;
    for (const auto& [_, m] : by_name_) out.push_back(m);
    return out;
  }

  /// One record per line: `name eps_real eps_imag`. `#` starts a comment.
  /// Records override defaults of the same name.
  static MaterialTable parse(std::istream& in, MaterialTable base = defaults()) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      Material m;
      if (!(ls >> m.name)) continue;
      std::string extra;
      if (!(ls >> m.rel_permittivity_real >> m.rel_permittivity_imag) || (ls >> extra))
        throw std::invalid_argument("material table line " + std::to_string(lineno) +
                                    ": expected `name eps_real eps_imag`");
      try {
        base.add(std::move(m));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("material table line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    return base;
  }

 private:
  std::map<std::string, Material> by_name_;
};

}  // namespace uavrt

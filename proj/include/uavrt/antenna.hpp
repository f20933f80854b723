#pragma once

#include <cmath>
#include <stdexcept>

#include "uavrt/geometry.hpp"

namespace uavrt {

/// Vertically oriented half-wave dipole. Omnidirectional in azimuth,
/// "donut" in elevation with nulls along the axis.
struct DipolePattern {
  double peak_gain_dbi{2.15};

  /// Normalized power pattern [cos((pi/2) cos th) / sin th]^2, th measured
  /// from the dipole axis (zenith).
  static double pattern_gain(double zenith_angle) {
    const double s = std::sin(zenith_angle);
    // the pattern vanishes like sin^2 near the poles
    if (std::abs(s) < 1e-12) return 0.0;
    const double f = std::cos(0.5 * kPi * std::cos(zenith_angle)) / s;
    return f * f;
  }

  /// Pattern value toward a direction (any length).
  static double pattern_gain(const Vec3& direction) {
    return pattern_gain(angle_between(direction, Vec3{0.0, 0.0, 1.0}));
  }
};

inline double pattern_gain(double zenith_angle) { return DipolePattern::pattern_gain(zenith_angle); }

/// Elevation misalignment factor g of a direct link: transmit pattern at the
/// departure zenith angle times receive pattern at the arrival zenith angle.
inline double link_misalignment_gain(const Vec3& tx_pos, const Vec3& rx_pos) {
  const Vec3 d = rx_pos - tx_pos;
  if (norm(d) == 0.0) throw std::domain_error("link_misalignment_gain: coincident positions");
  return DipolePattern::pattern_gain(d) * DipolePattern::pattern_gain(-d);
}

/// Antennas at both link ends.
struct AntennaPair {
  DipolePattern tx{};
  DipolePattern rx{};
};

}  // namespace uavrt

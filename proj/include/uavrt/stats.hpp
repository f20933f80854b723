#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "uavrt/channel.hpp"

namespace uavrt {

/// Snapshots of one trajectory run plus provenance.
struct RunResult {
  std::vector<Snapshot> snapshots;
  std::string config_digest;
  std::uint64_t seed{0};

  std::size_t mpc_count() const {
    std::size_t n = 0;
    for (const Snapshot& s : snapshots) n += s.mpcs.size();
    return n;
  }

  bool indices_contiguous() const {
    for (std::size_t i = 0; i < snapshots.size(); ++i)
      if (snapshots[i].index != static_cast<int>(i)) return false;
    return true;
  }
};

/// Empirical CDF with ties collapsed: probabilities[i] = P(X <= values[i]).
struct Ecdf {
  std::vector<double> values;
  std::vector<double> probabilities;

  bool empty() const { return values.empty(); }
  std::size_t size() const { return values.size(); }

  /// Step-function evaluation F(x).
  double operator()(double x) const {
    auto it = std::upper_bound(values.begin(), values.end(), x);
    if (it == values.begin()) return 0.0;
    return probabilities[static_cast<std::size_t>(it - values.begin()) - 1];
  }

  friend bool operator==(const Ecdf&, const Ecdf&) = default;
};

inline Ecdf ecdf(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ecdf: empty sample");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  Ecdf out;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    out.values.push_back(v[i]);
    out.probabilities.push_back(static_cast<double>(i + 1) / n);
  }
  return out;
}

struct PowerToaPoint {
  int snapshot{0};
  double toa{0.0};
  double power_dbm{0.0};
  Persistence persistence{Persistence::NonPersistent};
};

inline std::vector<PowerToaPoint> power_vs_toa(const RunResult& run) {
  std::vector<PowerToaPoint> out;
  out.reserve(run.mpc_count());
  for (const Snapshot& s : run.snapshots)
    for (const Mpc& m : s.mpcs) out.push_back({s.index, m.toa, m.power_dbm, m.persistence});
  return out;
}

template <typename Field>
std::vector<double> collect(const RunResult& run, Field field) {
  std::vector<double> v;
  v.reserve(run.mpc_count());
  for (const Snapshot& s : run.snapshots)
    for (const Mpc& m : s.mpcs) v.push_back(field(m));
  return v;
}

/// TOA distribution in nanoseconds; empty for a run without MPCs.
inline Ecdf toa_cdf(const RunResult& run) {
  const auto v = collect(run, [](const Mpc& m) { return m.toa * 1e9; });
  return v.empty() ? Ecdf{} : ecdf(v);
}

struct AngleCdfs {
  Ecdf doa_az;
  Ecdf doa_el;
  Ecdf dod_az;
  Ecdf dod_el;
};

/// One ECDF per angle dimension over every MPC of the run (degrees). Azimuths
/// are plain values in [0, 360), no circular wrapping.
inline AngleCdfs angle_cdfs(const RunResult& run) {
  AngleCdfs out;
  if (run.mpc_count() == 0) return out;
  out.doa_az = ecdf(collect(run, [](const Mpc& m) { return m.doa_az; }));
  out.doa_el = ecdf(collect(run, [](const Mpc& m) { return m.doa_el; }));
  out.dod_az = ecdf(collect(run, [](const Mpc& m) { return m.dod_az; }));
  out.dod_el = ecdf(collect(run, [](const Mpc& m) { return m.dod_el; }));
  return out;
}

/// Unit vector for an (azimuth, zenith) pair in degrees.
inline Vec3 unit_from_angles(double az_deg, double el_deg) {
  const double az = az_deg / kRadToDeg;
  const double el = el_deg / kRadToDeg;
  return {std::sin(el) * std::cos(az), std::sin(el) * std::sin(az), std::cos(el)};
}

/// Great-circle distance between two directions, degrees.
inline double angular_distance_deg(double az1, double el1, double az2, double el2) {
  return angle_between(unit_from_angles(az1, el1), unit_from_angles(az2, el2)) * kRadToDeg;
}

struct MpcRef {
  int snapshot{0};  // position in RunResult::snapshots
  int mpc{0};       // position in Snapshot::mpcs

  friend bool operator==(const MpcRef&, const MpcRef&) = default;
};

/// Life of one component along the trajectory.
struct TrackRecord {
  int birth{0};
  int death{0};
  Persistence persistence{Persistence::NonPersistent};
  std::vector<MpcRef> members;

  int lifetime() const { return static_cast<int>(members.size()); }
};

struct TrackingTolerance {
  double toa_tol_ns{2.0};
  double angle_tol{2.0};    // degrees

  void validate() const {
    if (!(toa_tol_ns > 0.0) || !(angle_tol > 0.0)) throw std::invalid_argument("tracking tolerances must be positive");
  }
};

/// Birth/death tracking. LOS and GRC each form one track; non-persistent MPCs
/// are linked greedily between consecutive snapshots, closest pair first,
/// when both the TOA and the DOA direction agree within tolerance.
inline std::vector<TrackRecord> track_mpcs(const RunResult& run, const TrackingTolerance& tol = {}) {
  tol.validate();
  std::vector<TrackRecord> tracks;

  for (Persistence cls : {Persistence::LOS, Persistence::GRC}) {
    TrackRecord t;
    t.persistence = cls;
    for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
      const auto& mpcs = run.snapshots[s].mpcs;
      for (std::size_t m = 0; m < mpcs.size(); ++m)
        if (mpcs[m].persistence == cls) t.members.push_back({static_cast<int>(s), static_cast<int>(m)});
    }
    if (t.members.empty()) continue;
    t.birth = run.snapshots[static_cast<std::size_t>(t.members.front().snapshot)].index;
    t.death = run.snapshots[static_cast<std::size_t>(t.members.back().snapshot)].index;
    tracks.push_back(std::move(t));
  }

  std::vector<std::size_t> open;  // tracks whose last member is in the previous snapshot
  for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
    const Snapshot& snap = run.snapshots[s];
    std::vector<int> current;
    for (std::size_t m = 0; m < snap.mpcs.size(); ++m)
      if (snap.mpcs[m].persistence == Persistence::NonPersistent) current.push_back(static_cast<int>(m));

    struct Candidate {
      double cost;
      std::size_t track;
      int mpc;
    };
    std::vector<Candidate> cands;
    for (std::size_t t : open) {
      const MpcRef last = tracks[t].members.back();
      const Mpc& a = run.snapshots[static_cast<std::size_t>(last.snapshot)].mpcs[static_cast<std::size_t>(last.mpc)];
      for (int m : current) {
        const Mpc& b = snap.mpcs[static_cast<std::size_t>(m)];
        const double dt = std::abs(b.toa - a.toa) * 1e9;
        const double da = angular_distance_deg(a.doa_az, a.doa_el, b.doa_az, b.doa_el);
        if (dt <= tol.toa_tol_ns && da <= tol.angle_tol) cands.push_back({dt / tol.toa_tol_ns + da / tol.angle_tol, t, m});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
      return std::tie(x.cost, x.track, x.mpc) < std::tie(y.cost, y.track, y.mpc);
    });

    std::vector<bool> track_taken(tracks.size(), false);
    std::vector<bool> mpc_taken(snap.mpcs.size(), false);
    std::vector<std::size_t> next_open;
    for (const Candidate& c : cands) {
      if (track_taken[c.track] || mpc_taken[static_cast<std::size_t>(c.mpc)]) continue;
      track_taken[c.track] = true;
      mpc_taken[static_cast<std::size_t>(c.mpc)] = true;
      tracks[c.track].members.push_back({static_cast<int>(s), c.mpc});
      tracks[c.track].death = snap.index;
      next_open.push_back(c.track);
    }
    for (int m : current) {
      if (mpc_taken[static_cast<std::size_t>(m)]) continue;
      TrackRecord t;
      t.birth = t.death = snap.index;
      t.members.push_back({static_cast<int>(s), m});
      tracks.push_back(std::move(t));
      next_open.push_back(tracks.size() - 1);
    }
    std::sort(next_open.begin(), next_open.end());
    open = std::move(next_open);
  }
  return tracks;
}

struct ValueRange {
  double min{0.0};
  double max{0.0};
};

struct RunSummary {
  std::size_t snapshot_count{0};
  std::size_t los_count{0};
  std::size_t grc_count{0};
  std::size_t non_persistent_count{0};
  double mean_mpcs_per_snapshot{0.0};
  std::size_t max_mpcs_per_snapshot{0};
  std::optional<ValueRange> toa_ns;
  std::optional<ValueRange> doa_az_deg;
  std::optional<ValueRange> doa_el_deg;
  std::optional<ValueRange> dod_az_deg;
  std::optional<ValueRange> dod_el_deg;
  std::size_t non_persistent_tracks{0};
  std::map<int, int> non_persistent_lifetimes;  // lifetime (snapshots) -> track count
};

inline RunSummary summarize(const RunResult& run, const TrackingTolerance& tol = {}) {
  RunSummary s;
  s.snapshot_count = run.snapshots.size();
  for (const Snapshot& snap : run.snapshots) {
    s.max_mpcs_per_snapshot = std::max(s.max_mpcs_per_snapshot, snap.mpcs.size());
    for (const Mpc& m : snap.mpcs) {
      switch (m.persistence) {
        case Persistence::LOS: ++s.los_count; break;
        case Persistence::GRC: ++s.grc_count; break;
        case Persistence::NonPersistent: ++s.non_persistent_count; break;
      }
    }
  }
  const std::size_t total = run.mpc_count();
  if (s.snapshot_count > 0) s.mean_mpcs_per_snapshot = static_cast<double>(total) / static_cast<double>(s.snapshot_count);
  if (total > 0) {
    auto range = [&](auto field) {
      const auto v = collect(run, field);
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return ValueRange{*lo, *hi};
    };
    s.toa_ns = range([](const Mpc& m) { return m.toa * 1e9; });
    s.doa_az_deg = range([](const Mpc& m) { return m.doa_az; });
    s.doa_el_deg = range([](const Mpc& m) { return m.doa_el; });
    s.dod_az_deg = range([](const Mpc& m) { return m.dod_az; });
    s.dod_el_deg = range([](const Mpc& m) { return m.dod_el; });
  }
  for (const TrackRecord& t : track_mpcs(run, tol)) {
    if (t.persistence != Persistence::NonPersistent) continue;
    ++s.non_persistent_tracks;
    ++s.non_persistent_lifetimes[t.lifetime()];
  }
  return s;
}

}  // namespace uavrt

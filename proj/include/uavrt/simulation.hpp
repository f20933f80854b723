#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "uavrt/channel.hpp"
#include "uavrt/raytracer.hpp"
#include "uavrt/scenario.hpp"
#include "uavrt/stats.hpp"

namespace uavrt {

/// Work-stealing loop over [0, n). Each index is handled exactly once; the
/// first exception thrown by `fn` is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

/// Traces every trajectory point and assembles the ordered snapshots.
inline std::vector<Snapshot> simulate_points(const Scene& scene, const Vec3& tx, const std::vector<TrajectoryPoint>& points,
                                             const RadioSetup& radio, const TraceConfig& cfg, unsigned workers = 0) {
  cfg.validate();
  radio.budget.validate();
  std::vector<Snapshot> snaps(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    const TrajectoryPoint& p = points[i];
    const auto paths = trace_all(scene, tx, p.position, cfg);
    snaps[i] = snapshot_from_paths(paths, scene, radio, p.index, p.time, p.position);
  });
  return snaps;
}

inline RunResult simulate_trajectory(const Scene& scene, const TrajectorySpec& traj, double rx_height,
                                     const RadioSetup& radio, const TraceConfig& cfg, unsigned workers = 0) {
  const double z0 = scene.surface().anchor_z;
  RunResult run;
  run.snapshots = simulate_points(scene, transmitter_position(traj, z0), sample_trajectory(traj, rx_height, z0), radio,
                                  cfg, workers);
  return run;
}

}  // namespace uavrt

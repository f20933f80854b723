#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uavrt/io.hpp"
#include "uavrt/scenario.hpp"
#include "uavrt/simulation.hpp"

namespace uavrt {

/// Scene named by the config: loaded from `scene_file` when set, generated
/// from the scenario spec and seed otherwise.
inline Scene scene_for(const RunConfig& cfg) {
  if (!cfg.scene_file.empty()) return load_scene(cfg.scene_file);
  return build_scene(cfg.scenario_with_seed(), cfg.trajectory);
}

/// End-to-end run at one receiver height.
inline RunResult run_simulation(const RunConfig& cfg, const Scene& scene, double rx_height) {
  RunConfig at_height = cfg;
  at_height.rx_height = rx_height;
  RunResult run = simulate_trajectory(scene, cfg.trajectory, rx_height, cfg.radio(), cfg.trace, cfg.workers);
  run.seed = cfg.seed;
  run.config_digest = config_digest(at_height);
  return run;
}

inline RunResult run_simulation(const RunConfig& cfg) { return run_simulation(cfg, scene_for(cfg), cfg.rx_height); }

/// Directory name used by sweeps for one height, e.g. "h150m".
inline std::string height_dir_name(double h) { return "h" + fmt9(h) + "m"; }

/// One run and export per configured receiver height. Returns the output
/// directories in height order.
inline std::vector<std::filesystem::path> run_sweep(const RunConfig& cfg, const std::filesystem::path& out_root) {
  const Scene scene = scene_for(cfg);
  std::vector<std::filesystem::path> dirs;
  for (double h : cfg.trajectory.rx_heights) {
    const auto dir = out_root / height_dir_name(h);
    export_run(run_simulation(cfg, scene, h), dir, cfg.tracking);
    dirs.push_back(dir);
  }
  return dirs;
}

}  // namespace uavrt

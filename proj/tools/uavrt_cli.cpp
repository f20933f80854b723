// uavrt: ray-traced UAV air-to-ground channel simulator front end.
//
//   uavrt scene    --scenario dense_urban --seed 7 --out scene.txt
//   uavrt scene    --inspect scene.txt
//   uavrt simulate --config rural.cfg
//   uavrt stats    out/mpcs.csv
//   uavrt sweep    --scenario dense_urban --out sweep/

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "uavrt/uavrt.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;

struct ConfigFailure {
  std::string what;
};

uavrt::RunConfig load_config(const std::string& path) {
  if (path.empty()) return uavrt::RunConfig{};
  return uavrt::parse_config(path);
}

/// Applies a scenario name from the command line on top of a loaded config,
/// keeping any explicit seed.
void override_scenario(uavrt::RunConfig& cfg, const std::string& name) {
  try {
    cfg.scenario = uavrt::ScenarioSpec::defaults(uavrt::parse_scenario_kind(name));
  } catch (const std::invalid_argument& e) {
    throw ConfigFailure{e.what()};
  }
}

void print_scene(const uavrt::Scene& scene) {
  std::printf("terrain   %.0f x %.0f m\n", scene.extent_x(), scene.extent_y());
  std::printf("surface   %s at z=%g m (%s)\n", scene.surface_kind() == uavrt::SurfaceKind::Sea ? "sea" : "ground",
              scene.surface().anchor_z, scene.surface_material().c_str());
  std::printf("buildings %zu\n", scene.buildings().size());
  if (scene.buildings().empty()) return;
  double hmin = 1e300, hmax = -1e300;
  for (const auto& b : scene.buildings()) {
    const double h = b.box.max_corner.z - b.box.min_corner.z;
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
  }
  std::printf("heights   %.2f .. %.2f m\n", hmin, hmax);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ray-traced 28 GHz UAV air-to-ground channel simulator"};
  app.require_subcommand(1);

  auto* scene_cmd = app.add_subcommand("scene", "Generate a scenario scene document or inspect one");
  std::string scene_scenario = "dense_urban", scene_out, scene_inspect, scene_config;
  std::uint64_t scene_seed = 1;
  scene_cmd->add_option("--scenario", scene_scenario, "over_sea | rural | suburban | dense_urban");
  scene_cmd->add_option("--seed", scene_seed, "Placement seed");
  scene_cmd->add_option("--config", scene_config, "Take scenario, seed and trajectory from a config file");
  scene_cmd->add_option("--out", scene_out, "Write the scene document here (default: stdout)");
  scene_cmd->add_option("--inspect", scene_inspect, "Summarize an existing scene document")->check(CLI::ExistingFile);

  auto* sim_cmd = app.add_subcommand("simulate", "Run one trajectory end to end");
  std::string sim_config, sim_out;
  std::optional<unsigned> sim_workers;
  sim_cmd->add_option("--config", sim_config, "Run configuration file")->required();
  sim_cmd->add_option("--out", sim_out, "Output directory (overrides output_dir)");
  sim_cmd->add_option("--workers", sim_workers, "Worker threads (0 = all cores)");

  auto* stats_cmd = app.add_subcommand("stats", "Recompute statistic tables from an exported mpcs.csv");
  std::string stats_input, stats_out;
  stats_cmd->add_option("mpcs_csv", stats_input, "mpcs.csv written by simulate/sweep")->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--out", stats_out, "Output directory (default: next to the input)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run every configured receiver height for one scenario");
  std::string sweep_scenario, sweep_config, sweep_out;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<unsigned> sweep_workers;
  sweep_cmd->add_option("--scenario", sweep_scenario, "over_sea | rural | suburban | dense_urban");
  sweep_cmd->add_option("--config", sweep_config, "Base run configuration");
  sweep_cmd->add_option("--seed", sweep_seed, "Placement seed");
  sweep_cmd->add_option("--out", sweep_out, "Output root (overrides output_dir); one directory per height");
  sweep_cmd->add_option("--workers", sweep_workers, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (scene_cmd->parsed()) {
      if (!scene_inspect.empty()) {
        print_scene(uavrt::load_scene(scene_inspect));
        return 0;
      }
      uavrt::RunConfig cfg = load_config(scene_config);
      if (scene_config.empty() || scene_cmd->count("--scenario")) override_scenario(cfg, scene_scenario);
      if (scene_config.empty() || scene_cmd->count("--seed")) cfg.seed = scene_seed;
      const uavrt::Scene scene = uavrt::scene_for(cfg);
      if (scene_out.empty()) {
        uavrt::write_scene(std::cout, scene);
      } else {
        uavrt::save_scene(scene_out, scene);
        std::printf("wrote %s (%zu buildings)\n", scene_out.c_str(), scene.buildings().size());
      }
      return 0;
    }

    if (sim_cmd->parsed()) {
      uavrt::RunConfig cfg = load_config(sim_config);
      if (sim_workers) cfg.workers = *sim_workers;
      const std::filesystem::path out = sim_out.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(sim_out);
      const uavrt::RunResult run = uavrt::run_simulation(cfg);
      uavrt::export_run(run, out, cfg.tracking);
      std::printf("%zu snapshots, %zu MPCs -> %s\n", run.snapshots.size(), run.mpc_count(), out.string().c_str());
      return 0;
    }

    if (stats_cmd->parsed()) {
      const std::filesystem::path in = stats_input;
      const std::filesystem::path out = stats_out.empty() ? in.parent_path() : std::filesystem::path(stats_out);
      uavrt::recompute_stats(in, out.empty() ? "." : out);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      if (sweep_scenario.empty() && sweep_config.empty()) throw ConfigFailure{"sweep needs --scenario or --config"};
      uavrt::RunConfig cfg = load_config(sweep_config);
      if (!sweep_scenario.empty()) override_scenario(cfg, sweep_scenario);
      if (sweep_seed) cfg.seed = *sweep_seed;
      if (sweep_workers) cfg.workers = *sweep_workers;
      const std::filesystem::path root = sweep_out.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(sweep_out);
      for (const auto& dir : uavrt::run_sweep(cfg, root)) std::printf("%s\n", dir.string().c_str());
      return 0;
    }
  } catch (const ConfigFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what.c_str());
    return kExitConfig;
  } catch (const uavrt::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSimulation;
  }
  return 0;
}

#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "uavrt/channel.hpp"
#include "uavrt/materials.hpp"
#include "uavrt/raytracer.hpp"
#include "uavrt/scenario.hpp"
#include "uavrt/stats.hpp"

namespace uavrt {

// ---------------------------------------------------------------------------
// Errors

/// Bad configuration. Carries the offending key and 1-based line (0 when the
/// problem is not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string s = "config";
    if (line > 0) s += " line " + std::to_string(line);
    if (!key.empty()) s += " key '" + key + "'";
    return s + ": " + what;
  }

  std::string key_;
  int line_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Number formatting

inline std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// Export precision: 9 significant digits.
inline std::string fmt9(double v) { return format_g(v, 9); }
/// Exact round-trip precision.
inline std::string fmt17(double v) { return format_g(v, 17); }

inline double quantize9(double v) { return std::strtod(fmt9(v).c_str(), nullptr); }

inline std::optional<double> parse_double(std::string_view s) {
  std::string tmp(s);
  if (tmp.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  ScenarioSpec scenario{ScenarioSpec::defaults(ScenarioKind::DenseUrban)};
  TrajectorySpec trajectory{};
  double rx_height{150.0};
  LinkBudget budget{};
  TraceConfig trace{};
  double peak_gain_dbi{2.15};
  std::string material_table;  // empty: built-in defaults
  std::string scene_file;      // empty: generate from the scenario spec
  std::string output_dir{"out"};
  std::uint64_t seed{1};
  unsigned workers{0};  // 0: hardware concurrency
  TrackingTolerance tracking{};
  MaterialTable materials{MaterialTable::defaults()};

  RadioSetup radio() const {
    RadioSetup r;
    r.budget = budget;
    r.antennas.tx.peak_gain_dbi = peak_gain_dbi;
    r.antennas.rx.peak_gain_dbi = peak_gain_dbi;
    r.materials = materials;
    return r;
  }

  ScenarioSpec scenario_with_seed() const {
    ScenarioSpec s = scenario;
    s.seed = seed;
    return s;
  }
};

/// Every key accepted in a config file, in canonical order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "scenario",         "seed",           "building_count",  "height_min",     "height_max",
      "footprint_min",    "footprint_max",  "street_gap",      "terrain_extent", "sea_depth",
      "corridor_half_width", "tx_height",   "rx_height",       "rx_heights",     "start_offset",
      "trajectory_length", "speed",         "sample_spacing",  "tx_power_dbm",   "sensitivity_dbm",
      "frequency_hz",     "peak_gain_dbi",  "max_reflection_order", "include_ground_bounce", "material_table",
      "scene_file",       "output_dir",     "workers",         "toa_tol_ns",     "angle_tol_deg"};
  return keys;
}

/// Canonical text of everything that influences simulation results. Output
/// location and worker count are excluded.
inline std::string canonical_config_text(const RunConfig& c) {
  std::ostringstream os;
  const ScenarioSpec& s = c.scenario;
  os << "scenario=" << to_string(s.kind) << '\n'
     << "seed=" << c.seed << '\n'
     << "building_count=" << s.building_count << '\n'
     << "height_min=" << fmt17(s.height_range.min) << '\n'
     << "height_max=" << fmt17(s.height_range.max) << '\n'
     << "footprint_min=" << fmt17(s.footprint_range.min) << '\n'
     << "footprint_max=" << fmt17(s.footprint_range.max) << '\n'
     << "street_gap=" << fmt17(s.street_gap) << '\n'
     << "terrain_extent=" << fmt17(s.terrain_extent) << '\n'
     << "sea_depth=" << fmt17(s.sea_depth) << '\n'
     << "corridor_half_width=" << fmt17(s.corridor_half_width) << '\n'
     << "tx_height=" << fmt17(c.trajectory.tx_height) << '\n'
     << "rx_height=" << fmt17(c.rx_height) << '\n'
     << "start_offset=" << fmt17(c.trajectory.start_horizontal_offset) << '\n'
     << "trajectory_length=" << fmt17(c.trajectory.length) << '\n'
     << "speed=" << fmt17(c.trajectory.speed) << '\n'
     << "sample_spacing=" << fmt17(c.trajectory.sample_spacing) << '\n'
     << "tx_power_dbm=" << fmt17(c.budget.tx_power_dbm) << '\n'
     << "sensitivity_dbm=" << fmt17(c.budget.sensitivity_dbm) << '\n'
     << "frequency_hz=" << fmt17(c.budget.carrier.frequency) << '\n'
     << "peak_gain_dbi=" << fmt17(c.peak_gain_dbi) << '\n'
     << "max_reflection_order=" << c.trace.max_reflection_order << '\n'
     << "include_ground_bounce=" << (c.trace.include_ground_bounce ? "true" : "false") << '\n'
     << "scene_file=" << c.scene_file << '\n'
     << "toa_tol_ns=" << fmt17(c.tracking.toa_tol_ns) << '\n'
     << "angle_tol_deg=" << fmt17(c.tracking.angle_tol) << '\n';
  for (const Material& m : c.materials.materials())
    os << "material=" << m.name << ' ' << fmt17(m.rel_permittivity_real) << ' ' << fmt17(m.rel_permittivity_imag) << '\n';
  return os.str();
}

inline std::string config_digest(const RunConfig& c) { return fnv1a_hex(canonical_config_text(c)); }

/// Parses flat `key = value` text. `#` starts a comment. Unknown or repeated
/// keys are rejected. Relative file paths resolve against `base_dir`.
inline RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = {}) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries;
  const auto& known = config_keys();

  int lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", lineno, "expected `key = value`");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("", lineno, "missing key");
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError(key, lineno, "unknown key");
    if (entries.count(key)) throw ConfigError(key, lineno, "duplicate key (first set on line " + std::to_string(entries[key].line) + ")");
    if (value.empty()) throw ConfigError(key, lineno, "missing value");
    entries[key] = {value, lineno};
  }

  auto number = [&](const std::string& key, double& out) {
    auto it = entries.find(key);
    if (it == entries.end()) return;
    auto v = parse_double(it->second.value);
    if (!v || !std::isfinite(*v)) throw ConfigError(key, it->second.line, "not a number: '" + it->second.value + "'");
    out = *v;
  };
  auto check = [&](const std::string& key, bool ok, const std::string& what) {
    if (ok) return;
    auto it = entries.find(key);
    throw ConfigError(key, it == entries.end() ? 0 : it->second.line, what);
  };
  auto integer = [&](const std::string& key, long long& out) {
    double d = static_cast<double>(out);
    number(key, d);
    check(key, d == std::floor(d) && std::abs(d) < 9.0e15, "must be an integer");
    out = static_cast<long long>(d);
  };

  RunConfig c;
  if (auto it = entries.find("scenario"); it != entries.end()) {
    try {
      c.scenario = ScenarioSpec::defaults(parse_scenario_kind(it->second.value));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("scenario", it->second.line, e.what());
    }
  }

  if (auto it = entries.find("seed"); it != entries.end()) {
    const std::string& v = it->second.value;
    char* end = nullptr;
    errno = 0;
    const unsigned long long seed = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE)
      throw ConfigError("seed", it->second.line, "must be a non-negative 64-bit integer");
    c.seed = seed;
  }

  long long count = c.scenario.building_count;
  integer("building_count", count);
  check("building_count", count >= 0, "must be >= 0");
  c.scenario.building_count = static_cast<int>(count);
  number("height_min", c.scenario.height_range.min);
  number("height_max", c.scenario.height_range.max);
  number("footprint_min", c.scenario.footprint_range.min);
  number("footprint_max", c.scenario.footprint_range.max);
  number("street_gap", c.scenario.street_gap);
  number("terrain_extent", c.scenario.terrain_extent);
  number("sea_depth", c.scenario.sea_depth);
  number("corridor_half_width", c.scenario.corridor_half_width);
  check("terrain_extent", c.scenario.terrain_extent > 0.0, "must be positive");
  check("sea_depth", c.scenario.sea_depth >= 0.0, "must be >= 0");
  check("street_gap", c.scenario.street_gap >= 0.0, "must be >= 0");
  check("corridor_half_width", c.scenario.corridor_half_width >= 0.0, "must be >= 0");

  number("tx_height", c.trajectory.tx_height);
  check("tx_height", c.trajectory.tx_height > 0.0, "must be positive");
  number("rx_height", c.rx_height);
  check("rx_height", c.rx_height > 0.0, "must be positive");
  if (auto it = entries.find("rx_heights"); it != entries.end()) {
    c.trajectory.rx_heights.clear();
    for (const std::string& part : split(it->second.value, ',')) {
      auto v = parse_double(trim(part));
      if (!v || !(*v > 0.0)) throw ConfigError("rx_heights", it->second.line, "expected comma-separated positive heights");
      c.trajectory.rx_heights.push_back(*v);
    }
  }
  number("start_offset", c.trajectory.start_horizontal_offset);
  check("start_offset", c.trajectory.start_horizontal_offset > 0.0, "must be positive");
  number("trajectory_length", c.trajectory.length);
  check("trajectory_length", c.trajectory.length >= 0.0, "must be >= 0");
  number("speed", c.trajectory.speed);
  check("speed", c.trajectory.speed > 0.0, "must be positive");
  number("sample_spacing", c.trajectory.sample_spacing);
  check("sample_spacing", c.trajectory.sample_spacing > 0.0, "must be positive");

  number("tx_power_dbm", c.budget.tx_power_dbm);
  number("sensitivity_dbm", c.budget.sensitivity_dbm);
  check("sensitivity_dbm", c.budget.tx_power_dbm > c.budget.sensitivity_dbm, "must be below tx_power_dbm");
  number("frequency_hz", c.budget.carrier.frequency);
  check("frequency_hz", c.budget.carrier.frequency > 0.0, "must be positive");
  number("peak_gain_dbi", c.peak_gain_dbi);

  long long order = c.trace.max_reflection_order;
  integer("max_reflection_order", order);
  check("max_reflection_order", order >= 0 && order <= TraceConfig::kMaxOrderLimit, "must be in [0, 3]");
  c.trace.max_reflection_order = static_cast<int>(order);
  if (auto it = entries.find("include_ground_bounce"); it != entries.end()) {
    const std::string& v = it->second.value;
    if (v == "true" || v == "1") c.trace.include_ground_bounce = true;
    else if (v == "false" || v == "0") c.trace.include_ground_bounce = false;
    else throw ConfigError("include_ground_bounce", it->second.line, "expected true or false");
  }

  long long workers = 0;
  integer("workers", workers);
  check("workers", workers >= 0 && workers <= 4096, "must be in [0, 4096]");
  c.workers = static_cast<unsigned>(workers);

  number("toa_tol_ns", c.tracking.toa_tol_ns);
  check("toa_tol_ns", c.tracking.toa_tol_ns > 0.0, "must be positive");
  number("angle_tol_deg", c.tracking.angle_tol);
  check("angle_tol_deg", c.tracking.angle_tol > 0.0, "must be positive");

  auto resolve = [&](const std::string& key) -> std::string {
    auto it = entries.find(key);
    if (it == entries.end()) return {};
    std::filesystem::path p = it->second.value;
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw ConfigError(key, it->second.line, "file not found: " + p.string());
    return p.string();
  };
  c.material_table = resolve("material_table");
  c.scene_file = resolve("scene_file");
  if (auto it = entries.find("output_dir"); it != entries.end()) c.output_dir = it->second.value;

  if (!c.material_table.empty()) {
    std::ifstream in(c.material_table);
    if (!in) throw ConfigError("material_table", entries["material_table"].line, "cannot read " + c.material_table);
    try {
      c.materials = MaterialTable::parse(in);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("material_table", entries["material_table"].line, e.what());
    }
  }

  // cross-field checks
  try {
    c.scenario_with_seed().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scenario", entries.count("scenario") ? entries["scenario"].line : 0, e.what());
  }
  return c;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Scene document

inline void write_scene(std::ostream& os, const Scene& scene) {
  os << "# uavrt scene v1\n";
  os << "terrain " << fmt17(scene.extent_x()) << ' ' << fmt17(scene.extent_y()) << '\n';
  os << "surface " << (scene.surface_kind() == SurfaceKind::Sea ? "sea" : "ground") << ' '
     << fmt17(scene.surface().anchor_z) << ' ' << scene.surface_material() << '\n';
  for (const Building& b : scene.buildings()) {
    os << "building";
    for (const Vec3* v : {&b.box.min_corner, &b.box.max_corner})
      os << ' ' << fmt17(v->x) << ' ' << fmt17(v->y) << ' ' << fmt17(v->z);
    os << ' ' << b.material << '\n';
  }
}

inline Scene read_scene(std::istream& is) {
  double ex = 10000.0, ey = 10000.0, z0 = 0.0;
  SurfaceKind kind = SurfaceKind::Ground;
  std::string surface_material = "wet_earth";
  std::vector<Building> buildings;
  bool have_terrain = false, have_surface = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw std::invalid_argument("scene line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    std::string extra;
    if (tag == "terrain") {
      if (!(ls >> ex >> ey) || (ls >> extra)) fail("expected `terrain <x> <y>`");
      have_terrain = true;
    } else if (tag == "surface") {
      std::string k;
      if (!(ls >> k >> z0 >> surface_material) || (ls >> extra)) fail("expected `surface <ground|sea> <z> <material>`");
      if (k == "ground") kind = SurfaceKind::Ground;
      else if (k == "sea") kind = SurfaceKind::Sea;
      else fail("unknown surface kind '" + k + "'");
      have_surface = true;
    } else if (tag == "building") {
      Building b;
      if (!(ls >> b.box.min_corner.x >> b.box.min_corner.y >> b.box.min_corner.z >> b.box.max_corner.x >>
            b.box.max_corner.y >> b.box.max_corner.z >> b.material) ||
          (ls >> extra))
        fail("expected `building <x0> <y0> <z0> <x1> <y1> <z1> <material>`");
      buildings.push_back(std::move(b));
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!have_terrain || !have_surface) throw std::invalid_argument("scene: missing terrain or surface record");
  return Scene(ex, ey, kind, z0, surface_material, std::move(buildings));
}

inline void save_scene(const std::filesystem::path& path, const Scene& scene) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path, "cannot open for writing");
  write_scene(os, scene);
  if (!os) throw IoError(path, "write failed");
}

inline Scene load_scene(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path, "cannot open for reading");
  return read_scene(is);
}

// ---------------------------------------------------------------------------
// Run export / ingest

inline constexpr std::string_view kMpcsHeader =
    "snapshot,time_s,rx_x,rx_y,rx_z,power_dbm,phase_rad,toa_ns,dod_az_deg,dod_el_deg,doa_az_deg,doa_el_deg,bounces,class";

/// Provenance line carried by every exported file.
struct RunStamp {
  std::uint64_t seed{0};
  std::string config_digest;
  std::size_t snapshots{0};
  TrackingTolerance tracking{};

  std::string line() const {
    return "# seed=" + std::to_string(seed) + " config_digest=" + (config_digest.empty() ? "-" : config_digest) +
           " snapshots=" + std::to_string(snapshots) + " toa_tol_ns=" + fmt17(tracking.toa_tol_ns) +
           " angle_tol_deg=" + fmt17(tracking.angle_tol);
  }
};

inline Persistence parse_persistence(std::string_view s) {
  if (s == "LOS") return Persistence::LOS;
  if (s == "GRC") return Persistence::GRC;
  if (s == "NonPersistent") return Persistence::NonPersistent;
  throw std::invalid_argument("unknown MPC class '" + std::string(s) + "'");
}

/// Rounds every exported quantity to its 9-significant-digit printed value,
/// converting units exactly as read_mpcs_csv does.
inline RunResult quantize(const RunResult& run) {
  RunResult q = run;
  for (Snapshot& s : q.snapshots) {
    s.time = quantize9(s.time);
    s.rx_pos = {quantize9(s.rx_pos.x), quantize9(s.rx_pos.y), quantize9(s.rx_pos.z)};
    for (Mpc& m : s.mpcs) {
      m.power_dbm = quantize9(m.power_dbm);
      m.phase = quantize9(m.phase);
      m.toa = quantize9(m.toa * 1e9) / 1e9;
      m.dod_az = quantize9(m.dod_az);
      m.dod_el = quantize9(m.dod_el);
      m.doa_az = quantize9(m.doa_az);
      m.doa_el = quantize9(m.doa_el);
      m.amplitude_linear = std::sqrt(from_db(m.power_dbm));
    }
  }
  return q;
}

inline void write_mpcs_csv(std::ostream& os, const RunResult& run, const RunStamp& stamp) {
  os << stamp.line() << '\n' << kMpcsHeader << '\n';
  for (const Snapshot& s : run.snapshots) {
    for (const Mpc& m : s.mpcs) {
      os << s.index << ',' << fmt9(s.time) << ',' << fmt9(s.rx_pos.x) << ',' << fmt9(s.rx_pos.y) << ','
         << fmt9(s.rx_pos.z) << ',' << fmt9(m.power_dbm) << ',' << fmt9(m.phase) << ',' << fmt9(m.toa * 1e9) << ','
         << fmt9(m.dod_az) << ',' << fmt9(m.dod_el) << ',' << fmt9(m.doa_az) << ',' << fmt9(m.doa_el) << ','
         << m.bounce_count << ',' << to_string(m.persistence) << '\n';
    }
  }
}

struct IngestedRun {
  RunResult run;
  RunStamp stamp;
};

inline IngestedRun read_mpcs_csv(std::istream& is) {
  IngestedRun out;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) { throw std::invalid_argument("mpcs.csv line " + std::to_string(lineno) + ": " + what); };

  bool header_seen = false;
  bool have_count = false;
  std::map<int, Snapshot> by_index;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "seed") out.stamp.seed = std::strtoull(v.c_str(), nullptr, 10);
        else if (k == "config_digest") out.stamp.config_digest = v == "-" ? "" : v;
        else if (k == "snapshots") { out.stamp.snapshots = std::strtoull(v.c_str(), nullptr, 10); have_count = true; }
        else if (k == "toa_tol_ns") out.stamp.tracking.toa_tol_ns = std::strtod(v.c_str(), nullptr);
        else if (k == "angle_tol_deg") out.stamp.tracking.angle_tol = std::strtod(v.c_str(), nullptr);
      }
      continue;
    }
    if (!header_seen) {
      if (line != kMpcsHeader) fail("unexpected header");
      header_seen = true;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 14) fail("expected 14 columns, got " + std::to_string(cols.size()));
    std::vector<double> num(12);
    for (std::size_t i = 0; i < 12; ++i) {
      auto v = parse_double(cols[i]);
      if (!v) fail("column " + std::to_string(i + 1) + " is not a number");
      num[i] = *v;
    }
    const int idx = static_cast<int>(num[0]);
    if (idx < 0 || static_cast<double>(idx) != num[0]) fail("bad snapshot index");
    Snapshot& s = by_index[idx];
    s.index = idx;
    s.time = num[1];
    s.rx_pos = {num[2], num[3], num[4]};
    Mpc m;
    m.power_dbm = num[5];
    m.amplitude_linear = std::sqrt(from_db(m.power_dbm));
    m.phase = num[6];
    m.toa = num[7] / 1e9;
    m.dod_az = num[8];
    m.dod_el = num[9];
    m.doa_az = num[10];
    m.doa_el = num[11];
    auto bounces = parse_double(cols[12]);
    if (!bounces || *bounces < 0) fail("bad bounce count");
    m.bounce_count = static_cast<int>(*bounces);
    try {
      m.persistence = parse_persistence(cols[13]);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    s.mpcs.push_back(m);
  }
  if (!header_seen) throw std::invalid_argument("mpcs.csv: missing header");

  std::size_t n = have_count ? out.stamp.snapshots : 0;
  if (!by_index.empty()) n = std::max<std::size_t>(n, static_cast<std::size_t>(by_index.rbegin()->first) + 1);
  out.stamp.snapshots = n;
  out.run.seed = out.stamp.seed;
  out.run.config_digest = out.stamp.config_digest;
  out.run.snapshots.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = by_index.find(static_cast<int>(i));
    if (it != by_index.end()) out.run.snapshots[i] = std::move(it->second);
    out.run.snapshots[i].index = static_cast<int>(i);
  }
  return out;
}

inline IngestedRun load_mpcs_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path, "cannot open for reading");
  return read_mpcs_csv(is);
}

inline void write_ecdf_csv(std::ostream& os, const Ecdf& e, const RunStamp& stamp) {
  os << stamp.line() << '\n' << "value,probability\n";
  for (std::size_t i = 0; i < e.size(); ++i) os << fmt9(e.values[i]) << ',' << fmt9(e.probabilities[i]) << '\n';
}

inline nlohmann::ordered_json summary_json(const RunSummary& s, const RunStamp& stamp) {
  nlohmann::ordered_json j;
  j["seed"] = stamp.seed;
  j["config_digest"] = stamp.config_digest;
  j["snapshot_count"] = s.snapshot_count;
  j["mpc_counts"] = {{"LOS", s.los_count}, {"GRC", s.grc_count}, {"NonPersistent", s.non_persistent_count}};
  j["mean_mpcs_per_snapshot"] = s.mean_mpcs_per_snapshot;
  j["max_mpcs_per_snapshot"] = s.max_mpcs_per_snapshot;
  auto range = [](const std::optional<ValueRange>& r) -> nlohmann::ordered_json {
    if (!r) return nullptr;
    return {{"min", r->min}, {"max", r->max}};
  };
  j["toa_ns"] = range(s.toa_ns);
  j["doa_az_deg"] = range(s.doa_az_deg);
  j["doa_el_deg"] = range(s.doa_el_deg);
  j["dod_az_deg"] = range(s.dod_az_deg);
  j["dod_el_deg"] = range(s.dod_el_deg);
  j["tracking"] = {{"toa_tol_ns", stamp.tracking.toa_tol_ns}, {"angle_tol_deg", stamp.tracking.angle_tol}};
  j["non_persistent_tracks"] = s.non_persistent_tracks;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [life, count] : s.non_persistent_lifetimes) hist[std::to_string(life)] = count;
  j["non_persistent_lifetime_histogram"] = hist;
  return j;
}

/// Statistic tables written next to mpcs.csv.
inline const std::vector<std::string>& stats_file_names() {
  static const std::vector<std::string> names = {"cdf_toa_ns.csv",    "cdf_doa_az_deg.csv", "cdf_doa_el_deg.csv",
                                                 "cdf_dod_az_deg.csv", "cdf_dod_el_deg.csv", "summary.json"};
  return names;
}

namespace detail {

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path, "cannot open for writing");
  writer(os);
  os.flush();
  if (!os) throw IoError(path, "write failed");
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError(dir, "cannot create directory");
}

}  // namespace detail

/// Writes the CDF tables and summary for an already quantized run.
inline void write_stats(const RunResult& quantized, const RunStamp& stamp, const std::filesystem::path& dir) {
  detail::ensure_dir(dir);
  const AngleCdfs ang = angle_cdfs(quantized);
  const Ecdf toa = toa_cdf(quantized);
  const std::vector<const Ecdf*> tables = {&toa, &ang.doa_az, &ang.doa_el, &ang.dod_az, &ang.dod_el};
  const auto& names = stats_file_names();
  for (std::size_t i = 0; i < tables.size(); ++i)
    detail::write_file(dir / names[i], [&](std::ostream& os) { write_ecdf_csv(os, *tables[i], stamp); });
  const RunSummary summary = summarize(quantized, stamp.tracking);
  detail::write_file(dir / "summary.json", [&](std::ostream& os) { os << summary_json(summary, stamp).dump(2) << '\n'; });
}

/// mpcs.csv, summary.json and the CDF tables. Statistics are computed from the
/// exported (rounded) values so that re-ingesting mpcs.csv reproduces them.
inline void export_run(const RunResult& run, const std::filesystem::path& dir, const TrackingTolerance& tracking = {}) {
  detail::ensure_dir(dir);
  RunStamp stamp{run.seed, run.config_digest, run.snapshots.size(), tracking};
  const RunResult q = quantize(run);
  detail::write_file(dir / "mpcs.csv", [&](std::ostream& os) { write_mpcs_csv(os, q, stamp); });
  write_stats(q, stamp, dir);
}

/// Recomputes the statistic tables from an exported mpcs.csv.
inline void recompute_stats(const std::filesystem::path& mpcs_csv, const std::filesystem::path& out_dir) {
  const IngestedRun in = load_mpcs_csv(mpcs_csv);
  write_stats(in.run, in.stamp, out_dir);
}

}  // namespace uavrt

#include "musiclite_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "musiclite/errors.hpp"

namespace musiclite::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ConfigError("config section '" + section + "' must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown key '" + key + "' in config section '" + section + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const std::string& section, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return;
  }
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + section + "." + key + "' has the wrong type");
  }
}

void read_optional(const json& obj, const std::string& section, const char* key,
                   std::optional<double>& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return;
  }
  if (it->is_null()) {
    out.reset();
    return;
  }
  if (!it->is_number()) {
    throw ConfigError("config key '" + section + "." + key + "' must be a number or null");
  }
  out = it->get<double>();
}

void parse_ofdm(const json& j, OfdmConfig& c) {
  check_keys(j, "ofdm", {"carrier_hz", "n_subcarriers", "n_symbols", "subcarrier_spacing_hz",
                         "symbol_duration_s", "cp_duration_s", "total_symbol_s", "modulation"});
  read(j, "ofdm", "carrier_hz", c.carrier_hz);
  read(j, "ofdm", "n_subcarriers", c.n_subcarriers);
  read(j, "ofdm", "n_symbols", c.n_symbols);
  read(j, "ofdm", "subcarrier_spacing_hz", c.subcarrier_spacing_hz);
  read(j, "ofdm", "symbol_duration_s", c.symbol_duration_s);
  read(j, "ofdm", "cp_duration_s", c.cp_duration_s);
  read(j, "ofdm", "total_symbol_s", c.total_symbol_s);
  std::string modulation = "4-QAM";
  read(j, "ofdm", "modulation", modulation);
  if (modulation != "4-QAM") {
    throw ConfigError("ofdm.modulation: only \"4-QAM\" is supported");
  }
}

void parse_scene(const json& j, RadarScene& s) {
  check_keys(j, "scene", {"target_range_m", "target_velocity_mps", "amplitude", "snr_db"});
  read(j, "scene", "target_range_m", s.target_range_m);
  read(j, "scene", "target_velocity_mps", s.target_velocity_mps);
  read(j, "scene", "amplitude", s.amplitude);
  read_optional(j, "scene", "snr_db", s.snr_db);
}

void parse_music(const json& j, MusicConfig& m) {
  check_keys(j, "music", {"n_targets", "grid_points", "range_max_m", "forward_backward"});
  read(j, "music", "n_targets", m.n_targets);
  read(j, "music", "grid_points", m.grid_points);
  read_optional(j, "music", "range_max_m", m.range_max_m);
  read(j, "music", "forward_backward", m.forward_backward);
}

void parse_cordic(const json& j, Scenario& s) {
  check_keys(j, "cordic", {"width", "frac", "iterations", "rounding", "sweeps_per_dimension",
                           "threshold_shift", "noise_floor_lsb"});
  read(j, "cordic", "width", s.format.width);
  read(j, "cordic", "frac", s.format.frac);
  read(j, "cordic", "iterations", s.cordic_iterations);
  std::string rounding = s.rounding == ShiftRounding::Nearest ? "nearest" : "truncate";
  read(j, "cordic", "rounding", rounding);
  if (rounding == "nearest") {
    s.rounding = ShiftRounding::Nearest;
  } else if (rounding == "truncate") {
    s.rounding = ShiftRounding::Truncate;
  } else {
    throw ConfigError("cordic.rounding must be \"nearest\" or \"truncate\"");
  }
  read(j, "cordic", "sweeps_per_dimension", s.svd.sweeps_per_dimension);
  read(j, "cordic", "threshold_shift", s.svd.threshold_shift);
  read(j, "cordic", "noise_floor_lsb", s.svd.noise_floor_lsb);
}

void parse_sweep(const json& j, SweepPlan& p) {
  check_keys(j, "sweep", {"snr_db", "runs", "seed"});
  read(j, "sweep", "snr_db", p.snr_db);
  read(j, "sweep", "runs", p.runs);
  read(j, "sweep", "seed", p.seed);
}

void parse_output(const json& j, OutputConfig& o) {
  check_keys(j, "output", {"dir", "spectrum"});
  std::string dir = o.dir.string();
  read(j, "output", "dir", dir);
  o.dir = dir;
  if (const auto it = j.find("spectrum"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw ConfigError("config key 'output.spectrum' must be a string or null");
    }
    o.spectrum = it->get<std::string>();
  }
}

}  // namespace

CliConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  CliConfig c;
  check_keys(root, "<root>", {"ofdm", "scene", "music", "cordic", "adder", "adders", "sweep", "output"});
  if (root.contains("adder") && root.contains("adders")) {
    throw ConfigError("config may set 'adder' or 'adders', not both");
  }
  if (const auto it = root.find("ofdm"); it != root.end()) parse_ofdm(*it, c.scenario.ofdm);
  if (const auto it = root.find("scene"); it != root.end()) parse_scene(*it, c.scenario.scene);
  if (const auto it = root.find("music"); it != root.end()) parse_music(*it, c.scenario.music);
  if (const auto it = root.find("cordic"); it != root.end()) parse_cordic(*it, c.scenario);
  if (const auto it = root.find("sweep"); it != root.end()) parse_sweep(*it, c.sweep);
  if (const auto it = root.find("output"); it != root.end()) parse_output(*it, c.output);
  if (const auto it = root.find("adder"); it != root.end()) {
    if (!it->is_string()) throw ConfigError("config key 'adder' must be a string");
    c.adders = {it->get<std::string>()};
  }
  if (const auto it = root.find("adders"); it != root.end()) {
    if (!it->is_array() || it->empty()) throw ConfigError("config key 'adders' must be a non-empty array");
    c.adders.clear();
    for (const json& a : *it) {
      if (!a.is_string()) throw ConfigError("config key 'adders' must hold strings");
      c.adders.push_back(a.get<std::string>());
    }
  }
  c.sweep.adders = c.adders;
  c.scenario.validate();
  c.sweep.validate();
  return c;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::ostringstream text;
  text << f.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_config(const CliConfig& c) {
  const Scenario& s = c.scenario;
  json j;
  j["ofdm"] = {{"carrier_hz", s.ofdm.carrier_hz},
               {"n_subcarriers", s.ofdm.n_subcarriers},
               {"n_symbols", s.ofdm.n_symbols},
               {"subcarrier_spacing_hz", s.ofdm.subcarrier_spacing_hz},
               {"symbol_duration_s", s.ofdm.symbol_duration_s},
               {"cp_duration_s", s.ofdm.cp_duration_s},
               {"total_symbol_s", s.ofdm.total_symbol_s},
               {"modulation", "4-QAM"}};
  j["scene"] = {{"target_range_m", s.scene.target_range_m},
                {"target_velocity_mps", s.scene.target_velocity_mps},
                {"amplitude", s.scene.amplitude},
                {"snr_db", s.scene.snr_db ? json(*s.scene.snr_db) : json(nullptr)}};
  j["music"] = {{"n_targets", s.music.n_targets},
                {"grid_points", s.music.grid_points},
                {"range_max_m", s.music.range_max_m ? json(*s.music.range_max_m) : json(nullptr)},
                {"forward_backward", s.music.forward_backward}};
  j["cordic"] = {{"width", s.format.width},
                 {"frac", s.format.frac},
                 {"iterations", s.cordic_iterations},
                 {"rounding", s.rounding == ShiftRounding::Nearest ? "nearest" : "truncate"},
                 {"sweeps_per_dimension", s.svd.sweeps_per_dimension},
                 {"threshold_shift", s.svd.threshold_shift},
                 {"noise_floor_lsb", s.svd.noise_floor_lsb}};
  j["adders"] = c.adders;
  j["sweep"] = {{"snr_db", c.sweep.snr_db}, {"runs", c.sweep.runs}, {"seed", c.sweep.seed}};
  j["output"] = {{"dir", c.output.dir.string()},
                 {"spectrum", c.output.spectrum ? json(c.output.spectrum->string()) : json(nullptr)}};
  return j.dump(2) + "\n";
}

}  // namespace musiclite::cli

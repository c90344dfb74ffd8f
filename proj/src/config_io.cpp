#include "uavfuse/config_io.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "uavfuse/errors.hpp"

namespace uavfuse {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

void check_schema_version(const json& j, const std::string& where) {
  if (!j.contains("schema_version")) {
    throw ConfigError(where + ": missing schema_version");
  }
  if (j["schema_version"].get<int>() != kConfigSchemaVersion) {
    throw ConfigError(where + ": unsupported schema_version");
  }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": key \"" + key + "\": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": key \"" + key + "\": " + e.what());
  }
}

EnuPosition enu_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(where + ": ENU position must be [east, north, up]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json enu_to_json(const EnuPosition& p) {
  return ordered_json::array({p.east_m, p.north_m, p.up_m});
}

template <int N>
Eigen::Matrix<double, N, N> matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) {
    throw ConfigError(where + ": expected a " + std::to_string(N) + "x" +
                      std::to_string(N) + " matrix");
  }
  Eigen::Matrix<double, N, N> m;
  for (int r = 0; r < N; ++r) {
    if (!j[r].is_array() || j[r].size() != N) {
      throw ConfigError(where + ": expected a " + std::to_string(N) + "x" +
                        std::to_string(N) + " matrix");
    }
    for (int c = 0; c < N; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

template <int N>
ordered_json matrix_to_json(const Eigen::Matrix<double, N, N>& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < N; ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < N; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

SensorScenario load_scenario(const std::filesystem::path& path) {
  const json j = load_json(path);
  const std::string where = path.string();
  check_keys(j, {"schema_version", "waypoints_enu", "speed_mps", "gt_rate_hz",
                 "rng_seed", "radar", "rf"},
             where);
  check_schema_version(j, where);

  SensorScenario sc;
  for (const json& wp : require<json>(j, "waypoints_enu", where)) {
    sc.waypoints.push_back(enu_from_json(wp, where + ": waypoints_enu"));
  }
  sc.speed_mps = require<double>(j, "speed_mps", where);
  sc.gt_rate_hz = require<double>(j, "gt_rate_hz", where);
  sc.rng_seed = require<std::uint64_t>(j, "rng_seed", where);

  const json jr = require<json>(j, "radar", where);
  check_keys(jr,
             {"origin_enu", "interval_s", "range_sigma_m", "az_sigma_deg",
              "el_sigma_deg", "max_range_m", "degradation_breakpoint_m",
              "degradation_factor", "fragment_beyond_breakpoint"},
             where + ": radar");
  sc.radar.origin = enu_from_json(require<json>(jr, "origin_enu", where), where);
  sc.radar.interval_s = get_or(jr, "interval_s", where, sc.radar.interval_s);
  sc.radar.range_sigma_m = get_or(jr, "range_sigma_m", where, sc.radar.range_sigma_m);
  sc.radar.az_sigma_deg = get_or(jr, "az_sigma_deg", where, sc.radar.az_sigma_deg);
  sc.radar.el_sigma_deg = get_or(jr, "el_sigma_deg", where, sc.radar.el_sigma_deg);
  sc.radar.max_range_m = get_or(jr, "max_range_m", where, sc.radar.max_range_m);
  sc.radar.degradation_breakpoint_m =
      get_or(jr, "degradation_breakpoint_m", where, sc.radar.degradation_breakpoint_m);
  sc.radar.degradation_factor =
      get_or(jr, "degradation_factor", where, sc.radar.degradation_factor);
  sc.radar.fragment_beyond_breakpoint =
      get_or(jr, "fragment_beyond_breakpoint", where, sc.radar.fragment_beyond_breakpoint);

  const json jf = require<json>(j, "rf", where);
  check_keys(jf,
             {"sensor_positions_enu", "interval_s", "timing_sigma_s", "outlier_prob",
              "outlier_scale_m", "dropout_prob", "dropout_windows"},
             where + ": rf");
  for (const json& sp : require<json>(jf, "sensor_positions_enu", where)) {
    sc.rf.sensor_positions.push_back(enu_from_json(sp, where + ": rf sensors"));
  }
  sc.rf.interval_s = get_or(jf, "interval_s", where, sc.rf.interval_s);
  sc.rf.timing_sigma_s = get_or(jf, "timing_sigma_s", where, sc.rf.timing_sigma_s);
  sc.rf.outlier_prob = get_or(jf, "outlier_prob", where, sc.rf.outlier_prob);
  sc.rf.outlier_scale_m = get_or(jf, "outlier_scale_m", where, sc.rf.outlier_scale_m);
  sc.rf.dropout_prob = get_or(jf, "dropout_prob", where, sc.rf.dropout_prob);
  if (jf.contains("dropout_windows")) {
    for (const json& w : jf.at("dropout_windows")) {
      check_keys(w, {"t_begin", "t_end", "prob"}, where + ": dropout_windows");
      sc.rf.dropout_windows.push_back({require<double>(w, "t_begin", where),
                                       require<double>(w, "t_end", where),
                                       require<double>(w, "prob", where)});
    }
  }
  sc.validate();
  return sc;
}

void save_scenario(const std::filesystem::path& path, const SensorScenario& sc) {
  ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["waypoints_enu"] = ordered_json::array();
  for (const EnuPosition& wp : sc.waypoints) j["waypoints_enu"].push_back(enu_to_json(wp));
  j["speed_mps"] = sc.speed_mps;
  j["gt_rate_hz"] = sc.gt_rate_hz;
  j["rng_seed"] = sc.rng_seed;
  j["radar"] = {{"origin_enu", enu_to_json(sc.radar.origin)},
                {"interval_s", sc.radar.interval_s},
                {"range_sigma_m", sc.radar.range_sigma_m},
                {"az_sigma_deg", sc.radar.az_sigma_deg},
                {"el_sigma_deg", sc.radar.el_sigma_deg},
                {"max_range_m", sc.radar.max_range_m},
                {"degradation_breakpoint_m", sc.radar.degradation_breakpoint_m},
                {"degradation_factor", sc.radar.degradation_factor},
                {"fragment_beyond_breakpoint", sc.radar.fragment_beyond_breakpoint}};
  ordered_json sensors = ordered_json::array();
  for (const EnuPosition& sp : sc.rf.sensor_positions) sensors.push_back(enu_to_json(sp));
  ordered_json windows = ordered_json::array();
  for (const DropoutWindow& w : sc.rf.dropout_windows) {
    windows.push_back({{"t_begin", w.t_begin}, {"t_end", w.t_end}, {"prob", w.prob}});
  }
  j["rf"] = {{"sensor_positions_enu", sensors},
             {"interval_s", sc.rf.interval_s},
             {"timing_sigma_s", sc.rf.timing_sigma_s},
             {"outlier_prob", sc.rf.outlier_prob},
             {"outlier_scale_m", sc.rf.outlier_scale_m},
             {"dropout_prob", sc.rf.dropout_prob},
             {"dropout_windows", windows}};
  write_json(path, j);
}

FusionConfig load_fusion_config(const std::filesystem::path& path) {
  const json j = load_json(path);
  const std::string where = path.string();
  check_keys(j,
             {"schema_version", "sigma_a", "r_radar", "r_rf", "gate_confidence",
              "gate_enabled", "radar_max_range_m", "radar_origin_enu",
              "range_gate_placement", "coast_on_range_reject", "radar_first_on_ties",
              "rf_seed_altitude_m", "init_velocity_variance",
              "init_seeded_altitude_variance", "init_position_r_inflation"},
             where);
  check_schema_version(j, where);

  FusionConfig cfg;
  cfg.noise.sigma_a = require<double>(j, "sigma_a", where);
  cfg.noise.r_radar = matrix_from_json<3>(require<json>(j, "r_radar", where), where);
  cfg.noise.r_rf = matrix_from_json<2>(require<json>(j, "r_rf", where), where);
  cfg.gate_confidence = get_or(j, "gate_confidence", where, cfg.gate_confidence);
  cfg.gate_enabled = get_or(j, "gate_enabled", where, cfg.gate_enabled);
  cfg.radar_max_range_m = get_or(j, "radar_max_range_m", where, cfg.radar_max_range_m);
  cfg.radar_origin = enu_from_json(require<json>(j, "radar_origin_enu", where), where);
  const std::string placement =
      get_or<std::string>(j, "range_gate_placement", where, "in_loop");
  if (placement == "in_loop") {
    cfg.range_gate_placement = RangeGatePlacement::InLoop;
  } else if (placement == "preprocess") {
    cfg.range_gate_placement = RangeGatePlacement::Preprocess;
  } else {
    throw ConfigError(where + ": range_gate_placement must be in_loop or preprocess");
  }
  cfg.coast_on_range_reject =
      get_or(j, "coast_on_range_reject", where, cfg.coast_on_range_reject);
  cfg.radar_first_on_ties =
      get_or(j, "radar_first_on_ties", where, cfg.radar_first_on_ties);
  cfg.init.rf_seed_altitude_m =
      get_or(j, "rf_seed_altitude_m", where, cfg.init.rf_seed_altitude_m);
  cfg.init.velocity_variance =
      get_or(j, "init_velocity_variance", where, cfg.init.velocity_variance);
  cfg.init.seeded_altitude_variance =
      get_or(j, "init_seeded_altitude_variance", where, cfg.init.seeded_altitude_variance);
  cfg.init.position_r_inflation =
      get_or(j, "init_position_r_inflation", where, cfg.init.position_r_inflation);
  cfg.validate();
  return cfg;
}

void save_fusion_config(const std::filesystem::path& path, const FusionConfig& cfg) {
  ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["sigma_a"] = cfg.noise.sigma_a;
  j["r_radar"] = matrix_to_json<3>(cfg.noise.r_radar);
  j["r_rf"] = matrix_to_json<2>(cfg.noise.r_rf);
  j["gate_confidence"] = cfg.gate_confidence;
  j["gate_enabled"] = cfg.gate_enabled;
  j["radar_max_range_m"] = cfg.radar_max_range_m;
  j["radar_origin_enu"] = enu_to_json(cfg.radar_origin);
  j["range_gate_placement"] =
      cfg.range_gate_placement == RangeGatePlacement::InLoop ? "in_loop" : "preprocess";
  j["coast_on_range_reject"] = cfg.coast_on_range_reject;
  j["radar_first_on_ties"] = cfg.radar_first_on_ties;
  j["rf_seed_altitude_m"] = cfg.init.rf_seed_altitude_m;
  j["init_velocity_variance"] = cfg.init.velocity_variance;
  j["init_seeded_altitude_variance"] = cfg.init.seeded_altitude_variance;
  j["init_position_r_inflation"] = cfg.init.position_r_inflation;
  write_json(path, j);
}

void write_run_manifest(const std::filesystem::path& out_dir,
                        const RunManifest& manifest) {
  ordered_json j;
  j["tool"] = "uavfuse";
  j["version"] = kToolVersion;
  j["subcommand"] = manifest.subcommand;
  j["config"] = manifest.config_path;
  j["inputs"] = manifest.input_paths;
  j["out_dir"] = manifest.out_dir;
  if (manifest.seed) {
    j["seed"] = *manifest.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["args"] = manifest.extra_args;
  write_json(out_dir / "run_manifest.json", j);
}

}  // namespace uavfuse

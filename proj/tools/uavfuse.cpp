#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavfuse/calib.hpp"
#include "uavfuse/config_io.hpp"
#include "uavfuse/csv_io.hpp"
#include "uavfuse/errors.hpp"
#include "uavfuse/geo.hpp"
#include "uavfuse/metrics.hpp"
#include "uavfuse/pipeline.hpp"
#include "uavfuse/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using namespace uavfuse;

void write_json_file(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

// Route rows by their modality column, not by which file they came from, so
// swapping the two input files cannot change the result.
void route_measurements(const std::vector<Measurement>& rows,
                        std::vector<Measurement>& radar,
                        std::vector<Measurement>& rf) {
  for (const Measurement& m : rows) {
    (m.modality == Modality::Radar3D ? radar : rf).push_back(m);
  }
}

ordered_json stats_json(const ErrorStats& s) {
  return {{"count", s.count},     {"min_m", s.min_m},   {"max_m", s.max_m},
          {"mean_m", s.mean_m},   {"std_m", s.std_m},   {"coverage_pct", s.coverage_pct}};
}

int cmd_simulate(const fs::path& config, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
  SensorScenario sc = load_scenario(config);
  if (seed) sc.rng_seed = *seed;
  fs::create_directories(out_dir);

  const auto gt = generate_waypoint_trajectory(sc);
  std::mt19937_64 radar_rng(sc.rng_seed);
  std::mt19937_64 rf_rng(sc.rng_seed + 0x517cc1b727220a95ull);
  const auto radar = simulate_radar(gt, sc, radar_rng);
  const auto rf = simulate_rf_fixes(gt, sc, rf_rng);

  write_ground_truth_csv(out_dir / "gt.csv", gt);
  write_measurements_csv(out_dir / "radar.csv", radar);
  write_measurements_csv(out_dir / "rf.csv", rf);
  write_run_manifest(out_dir, {"simulate", config.string(), {}, out_dir.string(),
                               sc.rng_seed, {}});
  std::cout << "wrote " << gt.size() << " truth samples, " << radar.size()
            << " radar fixes, " << rf.size() << " rf fixes to " << out_dir.string()
            << "\n";
  return 0;
}

int cmd_calibrate(const fs::path& radar_path, const fs::path& rf_path,
                  const fs::path& gt_path, const fs::path& out_dir,
                  const std::optional<fs::path>& base_config, bool robust) {
  const auto gt = read_ground_truth_csv(gt_path);
  std::vector<Measurement> radar, rf;
  route_measurements(read_measurements_csv(radar_path), radar, rf);
  route_measurements(read_measurements_csv(rf_path), radar, rf);
  fs::create_directories(out_dir);

  const CovarianceEstimate r_radar = estimate_measurement_covariance(radar, gt, robust);
  const CovarianceEstimate r_rf = estimate_measurement_covariance(rf, gt, robust);

  FusionConfig cfg;
  if (base_config) cfg = load_fusion_config(*base_config);
  cfg.noise.r_radar = r_radar.covariance;
  cfg.noise.r_rf = r_rf.covariance;
  save_fusion_config(out_dir / "fusion_config.json", cfg);

  ordered_json report;
  report["radar"] = {{"samples", r_radar.sample_count},
                     {"trimmed", r_radar.trimmed},
                     {"bias_m", {r_radar.bias(0), r_radar.bias(1), r_radar.bias(2)}}};
  report["rf"] = {{"samples", r_rf.sample_count},
                  {"trimmed", r_rf.trimmed},
                  {"bias_m", {r_rf.bias(0), r_rf.bias(1)}}};
  report["robust"] = robust;
  write_json_file(out_dir / "calibration_report.json", report);
  write_run_manifest(out_dir,
                     {"calibrate", base_config ? base_config->string() : "",
                      {radar_path.string(), rf_path.string(), gt_path.string()},
                      out_dir.string(), std::nullopt,
                      robust ? std::vector<std::string>{"--robust"}
                             : std::vector<std::string>{}});
  std::cout << "calibrated R_radar from " << r_radar.sample_count << " and R_rf from "
            << r_rf.sample_count << " residuals\n";
  return 0;
}

int cmd_fuse(const fs::path& radar_path, const fs::path& rf_path,
             const fs::path& config, const std::string& mode,
             const fs::path& out_dir) {
  const FusionConfig cfg = load_fusion_config(config);
  std::vector<Measurement> radar, rf;
  route_measurements(read_measurements_csv(radar_path), radar, rf);
  route_measurements(read_measurements_csv(rf_path), radar, rf);
  if (mode == "radar-only") rf.clear();
  if (mode == "rf-only") radar.clear();

  int track_discarded = 0;
  const bool has_track_ids =
      std::any_of(radar.begin(), radar.end(),
                  [](const Measurement& m) { return m.track_id.has_value(); });
  if (has_track_ids) {
    auto selected = select_largest_track(radar);
    track_discarded = static_cast<int>(radar.size() - selected.size());
    radar = std::move(selected);
  }

  FusionResult result = run_fusion(radar, rf, cfg);
  result.report.counts.track_discarded = track_discarded;

  fs::create_directories(out_dir);
  write_track_csv(out_dir / "track.csv", result.track);

  const RunCounts& c = result.report.counts;
  ordered_json report;
  report["mode"] = mode;
  report["counts"] = {{"radar_raw", c.radar_raw},
                      {"rf_raw", c.rf_raw},
                      {"track_discarded", c.track_discarded},
                      {"range_rejected", c.range_rejected},
                      {"nis_rejected_radar", c.nis_rejected_radar},
                      {"nis_rejected_rf", c.nis_rejected_rf},
                      {"updated_radar", c.updated_radar},
                      {"updated_rf", c.updated_rf},
                      {"updated", c.updated()},
                      {"coasted", c.coasted},
                      {"survivors", c.updated() + c.coasted}};
  report["radar_acceptance_rate"] = result.report.radar_acceptance_rate;
  report["rf_acceptance_rate"] = result.report.rf_acceptance_rate;
  write_json_file(out_dir / "report.json", report);
  write_run_manifest(out_dir, {"fuse", config.string(),
                               {radar_path.string(), rf_path.string()},
                               out_dir.string(), std::nullopt, {"--mode", mode}});
  std::cout << "fused track: " << result.track.size() << " steps (" << c.updated()
            << " updated, " << c.coasted << " coasted)\n";
  return 0;
}

int cmd_evaluate(const fs::path& track_path, const fs::path& gt_path,
                 const std::string& mode, double bin_seconds,
                 const fs::path& out_dir) {
  const auto gt = read_ground_truth_csv(gt_path);
  const auto rows = read_track_csv(track_path);
  std::vector<ScoredPoint> est;
  est.reserve(rows.size());
  for (const TrackRow& r : rows) est.push_back({r.timestamp, r.position, r.kind});

  const ErrorMode err_mode =
      mode == "2d" ? ErrorMode::Horizontal2D : ErrorMode::Full3D;
  const ErrorReport report = error_stats(est, gt, err_mode, bin_seconds);
  const std::vector<double> errors = errors_against_truth(est, gt, err_mode);

  fs::create_directories(out_dir);
  ordered_json j;
  j["mode"] = mode;
  j["bin_seconds"] = bin_seconds;
  j["overall"] = stats_json(report.overall);
  j["updated"] = report.updated ? stats_json(*report.updated) : ordered_json(nullptr);
  j["coasted"] = report.coasted ? stats_json(*report.coasted) : ordered_json(nullptr);
  j["excluded"] = report.excluded;
  write_json_file(out_dir / "report.json", j);
  write_cdf_csv(out_dir / "cdf.csv", empirical_cdf(errors));
  write_run_manifest(out_dir, {"evaluate", "",
                               {track_path.string(), gt_path.string()},
                               out_dir.string(), std::nullopt,
                               {"--mode", mode, "--bin-seconds", std::to_string(bin_seconds)}});
  std::cout << "evaluated " << report.overall.count << " estimates: mean "
            << report.overall.mean_m << " m, coverage " << report.overall.coverage_pct
            << " %\n";
  return 0;
}

struct AdaptColumns {
  std::string time{"t_s"};
  std::string lat{"lat_deg"};
  std::string lon{"lon_deg"};
  std::string alt{"alt_m"};
  std::string track{"track_id"};
};

int cmd_adapt(const fs::path& in_path, const fs::path& out_path,
              const std::string& format, const GeodeticCoord& origin,
              const std::string& modality, const AdaptColumns& cols) {
  std::ifstream in(in_path);
  if (!in) throw InputError("cannot open " + in_path.string());
  std::string header;
  if (!std::getline(in, header)) throw InputError(in_path.string() + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  std::vector<std::string> names;
  {
    std::istringstream ss(header);
    std::string f;
    while (std::getline(ss, f, ',')) names.push_back(f);
  }
  auto col = [&](const std::string& name, bool required) -> int {
    for (size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<int>(i);
    }
    if (required) {
      throw InputError(in_path.string() + ": missing column \"" + name + "\"");
    }
    return -1;
  };
  const int c_time = col(cols.time, true);
  const int c_lat = col(cols.lat, true);
  const int c_lon = col(cols.lon, true);
  const int c_alt = col(cols.alt, format == "gt");
  const int c_track = col(cols.track, false);

  const bool is_rf = modality == "rf";
  std::vector<Measurement> ms;
  std::vector<GroundTruthSample> gt;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    auto num = [&](int idx) {
      if (idx < 0 || idx >= static_cast<int>(f.size()) || f[idx].empty()) {
        throw InputError(in_path.string() + ":" + std::to_string(line_no) +
                         ": missing value");
      }
      return std::stod(f[idx]);
    };
    GeodeticCoord p;
    p.latitude_deg = num(c_lat);
    p.longitude_deg = num(c_lon);
    const bool has_alt =
        c_alt >= 0 && c_alt < static_cast<int>(f.size()) && !f[c_alt].empty();
    p.altitude_m = has_alt ? num(c_alt) : origin.altitude_m;
    const EnuPosition enu = geodetic_to_enu(p, origin);
    const double t = num(c_time);
    if (format == "gt") {
      gt.push_back({t, enu});
    } else {
      Measurement m;
      m.timestamp = t;
      if (is_rf) {
        m.modality = Modality::Rf2D;
        m.value.resize(2);
        m.value << enu.east_m, enu.north_m;
      } else {
        m.modality = Modality::Radar3D;
        m.value.resize(3);
        m.value = enu.vec();
        if (c_track >= 0 && c_track < static_cast<int>(f.size()) && !f[c_track].empty()) {
          m.track_id = static_cast<int>(std::stod(f[c_track]));
        }
      }
      ms.push_back(std::move(m));
    }
  }

  if (format == "gt") {
    std::sort(gt.begin(), gt.end(),
              [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    write_ground_truth_csv(out_path, gt);
    std::cout << "wrote " << gt.size() << " truth samples\n";
  } else {
    std::stable_sort(ms.begin(), ms.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    write_measurements_csv(out_path, ms);
    std::cout << "wrote " << ms.size() << " measurements\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar + passive-RF sensor fusion toolkit for UAV tracking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", uavfuse::kToolVersion);

  std::string config_path, out_dir, radar_path, rf_path, gt_path, track_path;
  std::string mode = "fused";
  std::string eval_mode = "3d";
  std::string in_path, out_path, format = "measurements", modality = "radar";
  std::string base_config;
  double bin_seconds = 4.0;
  double origin_lat = 0.0, origin_lon = 0.0, origin_alt = 0.0;
  std::uint64_t seed_value = 0;
  bool robust = false;
  AdaptColumns cols;

  CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic scenario");
  sim->add_option("--config", config_path, "Scenario config (JSON)")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  CLI::Option* seed_opt = sim->add_option("--seed", seed_value, "Override scenario seed");

  CLI::App* cal = app.add_subcommand("calibrate", "Estimate measurement covariances");
  cal->add_option("--radar", radar_path, "Radar measurement CSV")->required();
  cal->add_option("--rf", rf_path, "RF measurement CSV")->required();
  cal->add_option("--gt", gt_path, "Ground-truth CSV")->required();
  cal->add_option("--out", out_dir, "Output directory")->required();
  cal->add_option("--base-config", base_config, "Fusion config to update");
  cal->add_flag("--robust", robust, "Trim gross outliers before estimating");

  CLI::App* fuse = app.add_subcommand("fuse", "Run the fusion filter");
  fuse->add_option("--radar", radar_path, "Radar measurement CSV")->required();
  fuse->add_option("--rf", rf_path, "RF measurement CSV")->required();
  fuse->add_option("--config", config_path, "Fusion config (JSON)")->required();
  fuse->add_option("--mode", mode, "fused | radar-only | rf-only")
      ->check(CLI::IsMember({"fused", "radar-only", "rf-only"}));
  fuse->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* eval = app.add_subcommand("evaluate", "Score a track against truth");
  eval->add_option("--track", track_path, "Track CSV")->required();
  eval->add_option("--gt", gt_path, "Ground-truth CSV")->required();
  eval->add_option("--mode", eval_mode, "3d | 2d")->check(CLI::IsMember({"3d", "2d"}));
  eval->add_option("--bin-seconds", bin_seconds, "Coverage bin width");
  eval->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* adapt = app.add_subcommand("adapt", "Convert geodetic CSV to ENU");
  adapt->add_option("--in", in_path, "Geodetic CSV input")->required();
  adapt->add_option("--out", out_path, "ENU CSV output")->required();
  adapt->add_option("--format", format, "measurements | gt")
      ->check(CLI::IsMember({"measurements", "gt"}));
  adapt->add_option("--origin-lat", origin_lat, "ENU origin latitude, deg")->required();
  adapt->add_option("--origin-lon", origin_lon, "ENU origin longitude, deg")->required();
  adapt->add_option("--origin-alt", origin_alt, "ENU origin altitude, m");
  adapt->add_option("--modality", modality, "radar | rf (measurements format)")
      ->check(CLI::IsMember({"radar", "rf"}));
  adapt->add_option("--col-time", cols.time, "Time column name");
  adapt->add_option("--col-lat", cols.lat, "Latitude column name");
  adapt->add_option("--col-lon", cols.lon, "Longitude column name");
  adapt->add_option("--col-alt", cols.alt, "Altitude column name");
  adapt->add_option("--col-track", cols.track, "Track-id column name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      return cmd_simulate(config_path, out_dir, seed);
    }
    if (cal->parsed()) {
      std::optional<fs::path> base;
      if (!base_config.empty()) base = base_config;
      return cmd_calibrate(radar_path, rf_path, gt_path, out_dir, base, robust);
    }
    if (fuse->parsed()) {
      return cmd_fuse(radar_path, rf_path, config_path, mode, out_dir);
    }
    if (eval->parsed()) {
      return cmd_evaluate(track_path, gt_path, eval_mode, bin_seconds, out_dir);
    }
    if (adapt->parsed()) {
      return cmd_adapt(in_path, out_path, format,
                       {origin_lat, origin_lon, origin_alt}, modality, cols);
    }
  } catch (const uavfuse::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const uavfuse::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const uavfuse::InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

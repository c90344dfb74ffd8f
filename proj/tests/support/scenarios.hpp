#pragma once

// Shared scenario builders. default_scenario() mirrors scenarios/default.json
// (a unit test keeps the two in sync); its geometry follows the field layout
// the toolkit is calibrated for: four RF sensors around the flight area and
// the radar near the south-west corner, with the northern leg of the lap
// beyond the radar's reliable range.

#include <cstdint>

#include "uavfuse/pipeline.hpp"
#include "uavfuse/sim.hpp"

namespace testsupport {

/// Cut `cut` meters off each interior corner so turns happen over a few
/// seconds, the way a waypoint-following multirotor actually flies, instead
/// of as instantaneous velocity jumps.
inline std::vector<uavfuse::EnuPosition> chamfer_corners(
    const std::vector<uavfuse::EnuPosition>& wps, double cut) {
  std::vector<uavfuse::EnuPosition> out;
  out.push_back(wps.front());
  for (size_t i = 1; i + 1 < wps.size(); ++i) {
    const Eigen::Vector3d prev = wps[i - 1].vec();
    const Eigen::Vector3d here = wps[i].vec();
    const Eigen::Vector3d next = wps[i + 1].vec();
    const double d_in = (here - prev).norm();
    const double d_out = (next - here).norm();
    const double c = std::min({cut, 0.4 * d_in, 0.4 * d_out});
    out.push_back(uavfuse::EnuPosition::from_vec(here - c * (here - prev) / d_in));
    out.push_back(uavfuse::EnuPosition::from_vec(here + c * (next - here) / d_out));
  }
  out.push_back(wps.back());
  return out;
}

inline uavfuse::SensorScenario default_scenario(std::uint64_t seed = 1) {
  uavfuse::SensorScenario sc;
  sc.waypoints = chamfer_corners(
      {{0.0, 0.0, 60.0}, {250.0, 100.0, 60.0}, {200.0, 510.0, 60.0},
       {-60.0, 510.0, 60.0}, {-150.0, 150.0, 60.0}, {0.0, 0.0, 60.0}},
      30.0);
  sc.speed_mps = 10.0;
  sc.gt_rate_hz = 10.0;
  sc.rng_seed = seed;

  sc.radar.origin = {150.0, -350.0, 12.0};
  sc.radar.interval_s = 0.25;
  sc.radar.range_sigma_m = 2.5;
  sc.radar.az_sigma_deg = 2.0;
  sc.radar.el_sigma_deg = 1.0;
  sc.radar.max_range_m = 1200.0;
  sc.radar.degradation_breakpoint_m = 800.0;
  sc.radar.degradation_factor = 3.0;

  sc.rf.sensor_positions = {{-350.0, -200.0, 10.0},
                            {150.0, -350.0, 10.0},
                            {400.0, 500.0, 10.0},
                            {-200.0, 1100.0, 10.0}};
  sc.rf.interval_s = 3.88;
  sc.rf.timing_sigma_s = 115e-9;
  sc.rf.outlier_prob = 0.02;
  sc.rf.outlier_scale_m = 1000.0;
  sc.rf.dropout_prob = 0.05;
  return sc;
}

/// Fusion config matched to default_scenario geometry. R matrices are rough
/// priors; tests that need calibrated values run calibration first.
inline uavfuse::FusionConfig default_fusion_config() {
  uavfuse::FusionConfig cfg;
  cfg.radar_origin = {150.0, -350.0, 12.0};
  cfg.radar_max_range_m = 800.0;
  cfg.noise.sigma_a = 3.0;
  cfg.noise.r_radar = Eigen::Matrix3d::Identity() * 250.0;
  cfg.noise.r_rf = Eigen::Matrix2d::Identity() * 500.0;
  return cfg;
}

struct SimulatedRun {
  std::vector<uavfuse::GroundTruthSample> gt;
  std::vector<uavfuse::Measurement> radar;
  std::vector<uavfuse::Measurement> rf;
};

inline SimulatedRun simulate(const uavfuse::SensorScenario& sc) {
  SimulatedRun run;
  run.gt = uavfuse::generate_waypoint_trajectory(sc);
  std::mt19937_64 radar_rng(sc.rng_seed);
  std::mt19937_64 rf_rng(sc.rng_seed + 0x517cc1b727220a95ull);
  run.radar = uavfuse::simulate_radar(run.gt, sc, radar_rng);
  run.rf = uavfuse::simulate_rf_fixes(run.gt, sc, rf_rng);
  return run;
}

}  // namespace testsupport

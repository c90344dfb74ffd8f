#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "uavfuse/calib.hpp"
#include "uavfuse/geo.hpp"
#include "uavfuse/measurement.hpp"

namespace uavfuse {

inline constexpr double kSpeedOfLightMps = 299792458.0;

/// Radar sensor model: error is applied in polar coordinates (range plus two
/// angles) about the radar origin, which reproduces range-proportional error
/// growth without extra mechanism. Sigmas are multiplied by
/// degradation_factor beyond the breakpoint range.
struct RadarSimConfig {
  EnuPosition origin;
  double interval_s{0.25};
  double range_sigma_m{2.5};
  double az_sigma_deg{2.0};
  double el_sigma_deg{2.0};
  double max_range_m{1200.0};
  double degradation_breakpoint_m{800.0};
  double degradation_factor{3.0};
  bool fragment_beyond_breakpoint{false};
};

/// Dropout probability override for a time window of the flight, e.g. a
/// region where line of sight is obstructed.
struct DropoutWindow {
  double t_begin{0.0};
  double t_end{0.0};
  double prob{0.0};
};

struct RfSimConfig {
  std::vector<EnuPosition> sensor_positions;  // >= 3 for 2D TDOA
  double interval_s{3.88};
  double timing_sigma_s{40e-9};
  double outlier_prob{0.0};
  double outlier_scale_m{1000.0};  // outlier offsets span [1, 5] x scale
  double dropout_prob{0.0};
  std::vector<DropoutWindow> dropout_windows;
};

struct SensorScenario {
  std::vector<EnuPosition> waypoints;
  double speed_mps{10.0};
  double gt_rate_hz{10.0};
  RadarSimConfig radar;
  RfSimConfig rf;
  std::uint64_t rng_seed{1};

  void validate() const;
};

/// Arrival-time difference between two sensors: delta_t_s is the arrival time
/// at sensor_a minus the arrival time at sensor_b.
struct TdoaObservation {
  int sensor_a{0};
  int sensor_b{0};
  double delta_t_s{0.0};
};

/// Piecewise-linear constant-speed path through the scenario waypoints,
/// sampled at gt_rate_hz starting from t = 0.
std::vector<GroundTruthSample> generate_waypoint_trajectory(const SensorScenario& sc);

/// Sample truth at the radar cadence, perturb in polar coordinates, convert
/// back to ENU. Samples beyond max_range_m or at the radar origin are skipped.
std::vector<Measurement> simulate_radar(std::span<const GroundTruthSample> gt,
                                        const SensorScenario& sc,
                                        std::mt19937_64& rng);

/// Generate 2D RF fixes at the RF cadence: true arrival-time differences to
/// the reference sensor are perturbed with Gaussian timing noise and inverted
/// with tdoa_localize. Dropouts, heavy-tailed outliers and solver failures
/// remove or replace individual fixes.
std::vector<Measurement> simulate_rf_fixes(std::span<const GroundTruthSample> gt,
                                           const SensorScenario& sc,
                                           std::mt19937_64& rng);

/// Gauss-Newton solution of the 2D hyperbolic positioning problem with
/// residuals r = c * delta_t - (|p - s_a| - |p - s_b|), started from the
/// sensor centroid. Converges when the step norm drops below 1e-9 m; throws
/// NumericalError after 50 iterations and InputError for collinear sensors.
Eigen::Vector2d tdoa_localize(std::span<const EnuPosition> sensors,
                              std::span<const TdoaObservation> obs);

/// Noise-free observations of an emitter, one pair per non-reference sensor.
std::vector<TdoaObservation> make_tdoa_observations(
    std::span<const EnuPosition> sensors, const Eigen::Vector2d& emitter,
    int reference = 0);

}  // namespace uavfuse

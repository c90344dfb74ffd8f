#include "uavfuse/sim.hpp"

#include <cmath>
#include <numbers>

#include "uavfuse/errors.hpp"

namespace uavfuse {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Independent per-purpose engines so that, e.g., changing outlier_prob does
// not shift the noise draws of an otherwise identical run.
std::mt19937_64 substream(std::mt19937_64& rng, std::uint64_t salt) {
  std::uint64_t s = rng() ^ (salt * 0x9e3779b97f4a7c15ull);
  return std::mt19937_64(s);
}

Eigen::Vector2d horizontal(const EnuPosition& p) { return {p.east_m, p.north_m}; }

}  // namespace

void SensorScenario::validate() const {
  if (waypoints.size() < 2) {
    throw ConfigError("scenario needs at least two waypoints");
  }
  for (size_t i = 1; i < waypoints.size(); ++i) {
    if ((waypoints[i].vec() - waypoints[i - 1].vec()).norm() < 1e-9) {
      throw ConfigError("duplicate consecutive waypoints make a degenerate segment");
    }
  }
  if (!(speed_mps > 0.0)) throw ConfigError("speed_mps must be positive");
  if (!(gt_rate_hz > 0.0)) throw ConfigError("gt_rate_hz must be positive");
  if (!(radar.interval_s > 0.0) || !(rf.interval_s > 0.0)) {
    throw ConfigError("sensor intervals must be positive");
  }
  if (rf.sensor_positions.size() < 3) {
    throw ConfigError("2D TDOA needs at least three RF sensors");
  }
  for (double p : {rf.outlier_prob, rf.dropout_prob}) {
    if (p < 0.0 || p > 1.0) throw ConfigError("probabilities must lie in [0, 1]");
  }
  for (const DropoutWindow& w : rf.dropout_windows) {
    if (w.prob < 0.0 || w.prob > 1.0) {
      throw ConfigError("probabilities must lie in [0, 1]");
    }
  }
  if (!(radar.max_range_m > 0.0)) throw ConfigError("radar max_range_m must be positive");
  if (!(radar.degradation_factor > 0.0)) {
    throw ConfigError("radar degradation_factor must be positive");
  }
}

std::vector<GroundTruthSample> generate_waypoint_trajectory(const SensorScenario& sc) {
  sc.validate();

  std::vector<double> cumulative{0.0};
  for (size_t i = 1; i < sc.waypoints.size(); ++i) {
    const double seg = (sc.waypoints[i].vec() - sc.waypoints[i - 1].vec()).norm();
    cumulative.push_back(cumulative.back() + seg);
  }
  const double duration = cumulative.back() / sc.speed_mps;
  const double dt = 1.0 / sc.gt_rate_hz;
  const int n = static_cast<int>(std::floor(duration / dt + 1e-9)) + 1;

  std::vector<GroundTruthSample> out;
  out.reserve(n);
  size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    const double arc = t * sc.speed_mps;
    while (seg + 2 < cumulative.size() && arc > cumulative[seg + 1]) ++seg;
    const double seg_len = cumulative[seg + 1] - cumulative[seg];
    const double w = std::clamp((arc - cumulative[seg]) / seg_len, 0.0, 1.0);
    const Eigen::Vector3d pos = sc.waypoints[seg].vec() +
        w * (sc.waypoints[seg + 1].vec() - sc.waypoints[seg].vec());
    out.push_back({t, EnuPosition::from_vec(pos)});
  }
  return out;
}

std::vector<Measurement> simulate_radar(std::span<const GroundTruthSample> gt,
                                        const SensorScenario& sc,
                                        std::mt19937_64& rng) {
  sc.validate();
  std::mt19937_64 noise_rng = substream(rng, 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Eigen::Vector3d origin = sc.radar.origin.vec();
  std::vector<Measurement> out;
  int track_id = 0;
  bool was_beyond = false;

  const double t0 = gt.front().timestamp;
  const double t1 = gt.back().timestamp;
  for (double t = t0; t <= t1 + 1e-9; t += sc.radar.interval_s) {
    const double ts = std::min(t, t1);
    const Eigen::Vector3d truth = align_ground_truth(gt, ts).vec();
    const Eigen::Vector3d rel = truth - origin;
    const double range = rel.norm();
    if (range < 1e-6) continue;  // angles undefined at the radar itself
    if (range > sc.radar.max_range_m) continue;

    const double az = std::atan2(rel.y(), rel.x());
    const double el = std::atan2(rel.z(), rel.head<2>().norm());

    const bool beyond = range > sc.radar.degradation_breakpoint_m;
    const double degrade = beyond ? sc.radar.degradation_factor : 1.0;
    const double r_n = range + gauss(noise_rng) * sc.radar.range_sigma_m * degrade;
    const double az_n = az + gauss(noise_rng) * sc.radar.az_sigma_deg * kDegToRad * degrade;
    const double el_n = el + gauss(noise_rng) * sc.radar.el_sigma_deg * kDegToRad * degrade;

    if (sc.radar.fragment_beyond_breakpoint && beyond && !was_beyond) ++track_id;
    was_beyond = beyond;

    Eigen::Vector3d noisy;
    noisy << r_n * std::cos(el_n) * std::cos(az_n),
             r_n * std::cos(el_n) * std::sin(az_n),
             r_n * std::sin(el_n);
    Measurement m;
    m.timestamp = ts;
    m.modality = Modality::Radar3D;
    m.value = origin + noisy;
    m.track_id = track_id;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<TdoaObservation> make_tdoa_observations(
    std::span<const EnuPosition> sensors, const Eigen::Vector2d& emitter,
    int reference) {
  std::vector<TdoaObservation> obs;
  obs.reserve(sensors.size() - 1);
  const double d_ref = (emitter - horizontal(sensors[reference])).norm();
  for (int j = 0; j < static_cast<int>(sensors.size()); ++j) {
    if (j == reference) continue;
    const double d_j = (emitter - horizontal(sensors[j])).norm();
    obs.push_back({j, reference, (d_j - d_ref) / kSpeedOfLightMps});
  }
  return obs;
}

Eigen::Vector2d tdoa_localize(std::span<const EnuPosition> sensors,
                              std::span<const TdoaObservation> obs) {
  if (obs.size() < 2) {
    throw InsufficientDataError("tdoa_localize needs at least two observations");
  }
  for (const TdoaObservation& o : obs) {
    if (o.sensor_a == o.sensor_b || o.sensor_a < 0 || o.sensor_b < 0 ||
        o.sensor_a >= static_cast<int>(sensors.size()) ||
        o.sensor_b >= static_cast<int>(sensors.size())) {
      throw InputError("tdoa observation references an invalid sensor pair");
    }
  }

  // Collinear sensors leave the cross-range direction unobservable.
  Eigen::MatrixXd centered(sensors.size(), 2);
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const EnuPosition& s : sensors) centroid += horizontal(s);
  centroid /= static_cast<double>(sensors.size());
  for (size_t i = 0; i < sensors.size(); ++i) {
    centered.row(i) = (horizontal(sensors[i]) - centroid).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  if (svd.singularValues()(1) < 1e-9 * std::max(1.0, svd.singularValues()(0))) {
    throw InputError("tdoa_localize: sensors are collinear");
  }

  Eigen::Vector2d p = centroid;
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::VectorXd r(obs.size());
    Eigen::MatrixXd jac(obs.size(), 2);
    for (size_t i = 0; i < obs.size(); ++i) {
      const Eigen::Vector2d sa = horizontal(sensors[obs[i].sensor_a]);
      const Eigen::Vector2d sb = horizontal(sensors[obs[i].sensor_b]);
      const double da = std::max((p - sa).norm(), 1e-9);
      const double db = std::max((p - sb).norm(), 1e-9);
      r(i) = kSpeedOfLightMps * obs[i].delta_t_s - (da - db);
      jac.row(i) = -((p - sa) / da - (p - sb) / db).transpose();
    }
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    if (std::abs(jtj.determinant()) < 1e-14) {
      throw NumericalError("tdoa_localize: degenerate geometry at iterate");
    }
    const Eigen::Vector2d step = jtj.ldlt().solve(-jac.transpose() * r);
    p += step;
    if (!p.allFinite()) {
      throw NumericalError("tdoa_localize: iteration diverged");
    }
    if (step.norm() < 1e-9) return p;
  }
  throw NumericalError("tdoa_localize: no convergence in 50 iterations");
}

std::vector<Measurement> simulate_rf_fixes(std::span<const GroundTruthSample> gt,
                                           const SensorScenario& sc,
                                           std::mt19937_64& rng) {
  sc.validate();
  std::mt19937_64 noise_rng = substream(rng, 2);
  std::mt19937_64 dropout_rng = substream(rng, 3);
  std::mt19937_64 outlier_rng = substream(rng, 4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const auto& sensors = sc.rf.sensor_positions;
  std::vector<Measurement> out;

  const double t0 = gt.front().timestamp;
  const double t1 = gt.back().timestamp;
  for (double t = t0; t <= t1 + 1e-9; t += sc.rf.interval_s) {
    const double ts = std::min(t, t1);

    double dropout_prob = sc.rf.dropout_prob;
    for (const DropoutWindow& w : sc.rf.dropout_windows) {
      if (ts >= w.t_begin && ts < w.t_end) dropout_prob = w.prob;
    }
    const bool dropped = uniform(dropout_rng) < dropout_prob;
    const bool outlier = uniform(outlier_rng) < sc.rf.outlier_prob;
    const double outlier_angle = uniform(outlier_rng) * 2.0 * std::numbers::pi;
    const double outlier_mag = sc.rf.outlier_scale_m * (1.0 + 4.0 * uniform(outlier_rng));

    const Eigen::Vector2d truth = align_ground_truth(gt, ts).vec().head<2>();
    auto obs = make_tdoa_observations(sensors, truth);
    for (TdoaObservation& o : obs) {
      o.delta_t_s += gauss(noise_rng) * sc.rf.timing_sigma_s;
    }
    if (dropped) continue;

    Eigen::Vector2d fix;
    if (outlier) {
      // Emulates bad-geometry solver output: a gross offset from truth.
      fix = truth + outlier_mag * Eigen::Vector2d(std::cos(outlier_angle),
                                                  std::sin(outlier_angle));
    } else {
      try {
        fix = tdoa_localize(sensors, obs);
      } catch (const NumericalError&) {
        continue;  // counted by the caller as a lost fix
      }
    }
    Measurement m;
    m.timestamp = ts;
    m.modality = Modality::Rf2D;
    m.value = fix;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace uavfuse

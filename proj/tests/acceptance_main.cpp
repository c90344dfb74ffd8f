// Acceptance suite: one analytic, statistical or end-to-end check per
// criterion, each printed as a single pass/fail line. Returns the number of
// failed criteria.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "support/oracles.hpp"
#include "support/scenarios.hpp"
#include "uavfuse/calib.hpp"
#include "uavfuse/filter.hpp"
#include "uavfuse/geo.hpp"
#include "uavfuse/metrics.hpp"
#include "uavfuse/pipeline.hpp"
#include "uavfuse/sim.hpp"

using namespace uavfuse;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// --------------------------------------------------------------------------
// 1. Kalman filter final estimate equals the batch WLS trajectory solution.

void criterion_batch_equivalence() {
  NoiseConfig noise;
  noise.sigma_a = 0.7;
  noise.r_radar = Eigen::Matrix3d::Identity() * 12.0;
  noise.r_rf = Eigen::Matrix2d::Identity() * 40.0;

  oracle::BatchProblem prob;
  prob.t0 = 0.0;
  prob.prior_mean << 0, 0, 60, 8, -2, 0;
  prob.prior_cov = Matrix6d::Identity() * 30.0;
  prob.sigma_a = noise.sigma_a;
  prob.r_radar = noise.r_radar;
  prob.r_rf = noise.r_rf;

  std::vector<double> times;
  std::vector<Modality> modalities;
  for (int k = 1; k <= 50; ++k) {
    times.push_back(0.25 * k);
    modalities.push_back(k % 5 == 0 ? Modality::Rf2D : Modality::Radar3D);
  }
  std::mt19937_64 rng(101);
  const oracle::MatchedData data =
      oracle::simulate_matched(prob.prior_mean, 0.0, times, modalities, noise, rng);
  for (size_t k = 0; k < times.size(); ++k) {
    prob.measurements.push_back({times[k], data.z[k], modalities[k]});
  }

  FilterState fs;
  fs.estimate = CvState::from_vector(prob.prior_mean);
  fs.covariance = prob.prior_cov;
  for (size_t k = 0; k < times.size(); ++k) {
    fs = predict(fs, times[k] - fs.timestamp, noise);
    fs = update(fs, data.z[k], modalities[k], noise).first;
  }

  const Vector6d batch = oracle::batch_wls_final_state(prob);
  const double rel = (fs.estimate.to_vector() - batch).norm() / batch.norm();
  report(1, "batch-equivalence", rel < 1e-8, fmt("relative error %.2e", rel));
}

// --------------------------------------------------------------------------
// 2. NIS gate calibration at 95% under matched noise.

void criterion_nis_calibration() {
  NoiseConfig noise;
  noise.sigma_a = 1.0;
  noise.r_radar = Eigen::Matrix3d::Identity() * 10.0;
  noise.r_rf = Eigen::Matrix2d::Identity() * 30.0;

  const int steps = 8000;
  std::vector<double> times;
  std::vector<Modality> modalities;
  for (int k = 1; k <= steps; ++k) {
    times.push_back(0.25 * k);
    modalities.push_back(k % 3 == 0 ? Modality::Rf2D : Modality::Radar3D);
  }
  std::mt19937_64 rng(202);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector6d m0;
  m0 << 0, 0, 60, 5, 5, 0;
  Vector6d truth0 = m0;
  for (int i = 0; i < 6; ++i) truth0(i) += 3.0 * gauss(rng);
  const oracle::MatchedData data =
      oracle::simulate_matched(truth0, 0.0, times, modalities, noise, rng);

  FilterState fs;
  fs.estimate = CvState::from_vector(m0);
  fs.covariance = Matrix6d::Identity() * 9.0;
  int accepted = 0;
  for (size_t k = 0; k < times.size(); ++k) {
    fs = predict(fs, times[k] - fs.timestamp, noise);
    const auto [next, outcome] =
        validated_update(fs, data.z[k], modalities[k], noise, 0.95);
    fs = next;
    if (outcome.kind == StepKind::Updated) ++accepted;
  }
  const double rate = 100.0 * accepted / steps;
  report(2, "nis-gate-calibration", rate >= 93.0 && rate <= 97.0,
         fmt("acceptance %.2f%% over %d updates", rate, steps));
}

// --------------------------------------------------------------------------
// 3. NEES consistency: matched-covariance Monte Carlo through run_fusion.

void criterion_nees_consistency() {
  NoiseConfig noise;
  noise.sigma_a = 1.0;
  noise.r_radar = Eigen::Matrix3d::Identity() * 16.0;
  noise.r_rf = Eigen::Matrix2d::Identity() * 49.0;

  FusionConfig cfg;
  cfg.noise = noise;
  cfg.gate_confidence = 0.9999;  // keep conditioning effects negligible
  cfg.radar_origin = {0.0, 0.0, 0.0};
  cfg.radar_max_range_m = 1e9;

  // Measurement times mirror the default scenario cadences.
  std::vector<double> times;
  std::vector<Modality> modalities;
  double t_rf = 3.88;
  for (double t = 0.25; t <= 120.0; t += 0.25) {
    times.push_back(t);
    modalities.push_back(Modality::Radar3D);
    if (t + 1e-9 >= t_rf) {
      times.push_back(t_rf);
      modalities.push_back(Modality::Rf2D);
      t_rf += 3.88;
    }
  }

  std::mt19937_64 rng(303);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double nees_sum = 0.0;
  long nees_count = 0;
  const int runs = 100;
  for (int run = 0; run < runs; ++run) {
    Vector6d truth0;
    truth0 << 0, 0, 60, 8, -4, 0;
    for (int i = 3; i < 6; ++i) truth0(i) += 3.0 * gauss(rng);
    const oracle::MatchedData data =
        oracle::simulate_matched(truth0, 0.0, times, modalities, noise, rng);

    std::vector<Measurement> radar, rf;
    std::vector<GroundTruthSample> gt;
    gt.push_back({0.0, EnuPosition::from_vec(truth0.head<3>())});
    for (size_t k = 0; k < times.size(); ++k) {
      Measurement m;
      m.timestamp = times[k];
      m.modality = modalities[k];
      m.value = data.z[k];
      if (m.modality == Modality::Radar3D) {
        m.track_id = 0;
        radar.push_back(m);
      } else {
        rf.push_back(m);
      }
      gt.push_back({times[k], EnuPosition::from_vec(data.truth[k + 1].head<3>())});
    }
    const FusionResult result = run_fusion(radar, rf, cfg);
    const ConsistencySummary s = consistency_report(result.track, gt);
    nees_sum += s.mean_nees * static_cast<double>(s.nees.size());
    nees_count += static_cast<long>(s.nees.size());
  }
  const double mean = nees_sum / nees_count;
  // 95% band for a 100-run NEES average of a 3-dof chi-squared variable:
  // [chi2.ppf(0.025, 300), chi2.ppf(0.975, 300)] / 100.
  const bool pass = mean >= 2.5391 && mean <= 3.4987;
  report(3, "nees-consistency", pass,
         fmt("mean position-NEES %.3f over %d runs (band [2.539, 3.499])", mean, runs));
}

// --------------------------------------------------------------------------
// Replica helpers shared by criteria 4-7.

struct ReplicaRun {
  testsupport::SimulatedRun data;
  FusionConfig cfg;
};

ReplicaRun make_replica(std::uint64_t seed, double outlier_prob, double dropout_prob,
                        bool gate_enabled) {
  SensorScenario sc = testsupport::default_scenario(seed);
  sc.rf.outlier_prob = outlier_prob;
  sc.rf.dropout_prob = dropout_prob;
  ReplicaRun run;
  run.data = testsupport::simulate(sc);

  // Calibrate per-modality noise on this run's own residuals, robustly so
  // injected outliers cannot inflate R. Radar noise is estimated from the
  // range-gated population, since that is what the filter ingests.
  run.cfg = testsupport::default_fusion_config();
  run.cfg.gate_enabled = gate_enabled;
  std::vector<Measurement> radar_in_range;
  for (const Measurement& m : run.data.radar) {
    if (range_gate(m, run.cfg.radar_origin, run.cfg.radar_max_range_m)) {
      radar_in_range.push_back(m);
    }
  }
  run.cfg.noise.r_radar =
      estimate_measurement_covariance(radar_in_range, run.data.gt, true).covariance;
  run.cfg.noise.r_rf =
      estimate_measurement_covariance(run.data.rf, run.data.gt, true).covariance;
  return run;
}

double fused_mean_error(const ReplicaRun& run, const FusionResult& result) {
  return error_stats(scored_from_track(result.track), run.data.gt, ErrorMode::Full3D)
      .overall.mean_m;
}

// --------------------------------------------------------------------------
// 4. Outlier suppression: gating keeps the track near the clean baseline.

void criterion_outlier_suppression() {
  const std::uint64_t seed = 11;
  ReplicaRun clean = make_replica(seed, 0.0, 0.0, true);
  ReplicaRun gated = make_replica(seed, 0.05, 0.0, true);
  ReplicaRun ungated = make_replica(seed, 0.05, 0.0, false);
  ungated.cfg.noise = gated.cfg.noise;  // same calibration, gate off

  const double clean_mean =
      fused_mean_error(clean, run_fusion(clean.data.radar, clean.data.rf, clean.cfg));
  const double gated_mean =
      fused_mean_error(gated, run_fusion(gated.data.radar, gated.data.rf, gated.cfg));
  const double ungated_mean = fused_mean_error(
      ungated, run_fusion(ungated.data.radar, ungated.data.rf, ungated.cfg));

  const bool pass =
      gated_mean <= 1.2 * clean_mean && ungated_mean > 3.0 * clean_mean;
  report(4, "outlier-suppression", pass,
         fmt("clean %.1f m, gated %.1f m, ungated %.1f m", clean_mean, gated_mean,
             ungated_mean));
}

// --------------------------------------------------------------------------
// 5. Coverage extension: fused track covers every bin, standalones do not.

void criterion_coverage_extension() {
  ReplicaRun run = make_replica(21, 0.0, 0.30, true);
  const FusionResult fused = run_fusion(run.data.radar, run.data.rf, run.cfg);
  const ErrorReport rep =
      error_stats(scored_from_track(fused.track), run.data.gt, ErrorMode::Full3D);

  // Standalone modality coverage, Table-II style: validated measurements only.
  std::vector<Measurement> radar_acc, rf_acc;
  for (const Measurement& m : fused.accepted) {
    (m.modality == Modality::Radar3D ? radar_acc : rf_acc).push_back(m);
  }
  const std::pair<double, double> span{run.data.gt.front().timestamp,
                                       run.data.gt.back().timestamp};
  auto cov = [&](const std::vector<Measurement>& ms) {
    std::vector<double> t;
    for (const auto& m : ms) t.push_back(m.timestamp);
    return coverage(t, span, 4.0);
  };
  const double radar_cov = cov(radar_acc);
  const double rf_cov = cov(rf_acc);

  const bool pass =
      rep.overall.coverage_pct == 100.0 && radar_cov < 90.0 && rf_cov < 90.0;
  report(5, "coverage-extension", pass,
         fmt("fused %.1f%%, radar %.1f%%, rf %.1f%%", rep.overall.coverage_pct,
             radar_cov, rf_cov));
}

// --------------------------------------------------------------------------
// 6. Fusion does not degrade accuracy on the calibrated replica.

void criterion_fusion_accuracy() {
  double fused_sum = 0.0, radar_sum = 0.0, rf_sum = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    ReplicaRun run = make_replica(1000 + s, 0.03, 0.05, true);
    const FusionResult fused = run_fusion(run.data.radar, run.data.rf, run.cfg);

    std::vector<Measurement> radar_acc, rf_acc;
    for (const Measurement& m : fused.accepted) {
      (m.modality == Modality::Radar3D ? radar_acc : rf_acc).push_back(m);
    }
    fused_sum += fused_mean_error(run, fused);
    radar_sum += error_stats(scored_from_measurements(radar_acc), run.data.gt,
                             ErrorMode::Full3D)
                     .overall.mean_m;
    rf_sum += error_stats(scored_from_measurements(rf_acc), run.data.gt,
                          ErrorMode::Horizontal2D)
                  .overall.mean_m;
  }
  const double fused_mean = fused_sum / seeds;
  const double radar_mean = radar_sum / seeds;
  const double rf_mean = rf_sum / seeds;
  const double best = std::min(radar_mean, rf_mean);

  const bool tuned = radar_mean > 17.0 && radar_mean < 25.0 && rf_mean > 20.0 &&
                     rf_mean < 32.0;
  const bool pass = tuned && fused_mean <= 1.15 * best;
  report(6, "fusion-accuracy", pass,
         fmt("fused %.1f m vs radar %.1f m / rf %.1f m (limit %.1f m)", fused_mean,
             radar_mean, rf_mean, 1.15 * best));
}

// --------------------------------------------------------------------------
// 7. Coasted estimates degrade gracefully.

void criterion_coasting_sanity() {
  double ratio_sum = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    ReplicaRun run = make_replica(2000 + s, 0.03, 0.05, true);
    const FusionResult fused = run_fusion(run.data.radar, run.data.rf, run.cfg);
    const ErrorReport rep =
        error_stats(scored_from_track(fused.track), run.data.gt, ErrorMode::Full3D);
    if (!rep.updated || !rep.coasted) {
      report(7, "coasting-sanity", false, "run produced no coasted steps");
      return;
    }
    ratio_sum += rep.coasted->mean_m / rep.updated->mean_m;
  }
  const double ratio = ratio_sum / seeds;
  report(7, "coasting-sanity", ratio >= 1.0 && ratio <= 2.5,
         fmt("coasted/updated mean-error ratio %.2f", ratio));
}

// --------------------------------------------------------------------------
// 8. Geodesy against the long-double oracle.

void criterion_geodesy() {
  const GeodeticCoord origin{35.72745, -78.69608, 0.0};
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> dlat(-0.09, 0.09);
  std::uniform_real_distribution<double> dlon(-0.11, 0.11);
  std::uniform_real_distribution<double> alt(-100.0, 3000.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GeodeticCoord p{origin.latitude_deg + dlat(rng),
                          origin.longitude_deg + dlon(rng), alt(rng)};
    const EnuPosition enu = geodetic_to_enu(p, origin);
    const oracle::Enu want = oracle::wgs84_enu(p, origin);
    const double err = std::max({std::abs(enu.east_m - double(want.east)),
                                 std::abs(enu.north_m - double(want.north)),
                                 std::abs(enu.up_m - double(want.up))});
    worst = std::max(worst, err);
  }
  report(8, "geodesy-oracle", worst < 1e-6, fmt("worst component error %.2e m", worst));
}

// --------------------------------------------------------------------------
// 9. TDOA inversion on noiseless observations.

void criterion_tdoa_inversion() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> pos(-800.0, 800.0);
  std::uniform_real_distribution<double> frac(0.15, 0.85);
  double worst = 0.0;
  int solved = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<EnuPosition> sensors;
    Eigen::Vector2d lo(1e9, 1e9), hi(-1e9, -1e9);
    for (int s = 0; s < 4; ++s) {
      EnuPosition sp{pos(rng), pos(rng), 10.0};
      sensors.push_back(sp);
      lo = lo.cwiseMin(Eigen::Vector2d(sp.east_m, sp.north_m));
      hi = hi.cwiseMax(Eigen::Vector2d(sp.east_m, sp.north_m));
    }
    if ((hi - lo).minCoeff() < 200.0) {
      --i;  // reject cramped geometries and redraw
      continue;
    }
    const Eigen::Vector2d emitter(lo.x() + frac(rng) * (hi.x() - lo.x()),
                                  lo.y() + frac(rng) * (hi.y() - lo.y()));
    try {
      const Eigen::Vector2d p =
          tdoa_localize(sensors, make_tdoa_observations(sensors, emitter));
      worst = std::max(worst, (p - emitter).norm());
      ++solved;
    } catch (const std::exception&) {
    }
  }
  report(9, "tdoa-inversion", solved == 100 && worst < 1e-6,
         fmt("%d/100 solved, worst error %.2e m", solved, worst));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_batch_equivalence();
  criterion_nis_calibration();
  criterion_nees_consistency();
  criterion_outlier_suppression();
  criterion_coverage_extension();
  criterion_fusion_accuracy();
  criterion_coasting_sanity();
  criterion_geodesy();
  criterion_tdoa_inversion();
  const auto t1 = std::chrono::steady_clock::now();
  std::printf("%d criterion(s) failed; total %.1f s\n", failures,
              std::chrono::duration<double>(t1 - t0).count());
  return failures;
}

#include "uavfuse/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "uavfuse/errors.hpp"
#include "uavfuse/filter.hpp"

namespace uavfuse {

std::vector<ScoredPoint> scored_from_measurements(std::span<const Measurement> ms) {
  std::vector<ScoredPoint> out;
  out.reserve(ms.size());
  for (const Measurement& m : ms) {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    p.head(m.dim()) = m.value;
    out.push_back({m.timestamp, p, StepKind::Updated});
  }
  return out;
}

std::vector<ScoredPoint> scored_from_track(std::span<const TrackPoint> track) {
  std::vector<ScoredPoint> out;
  out.reserve(track.size());
  for (const TrackPoint& tp : track) {
    out.push_back({tp.timestamp, tp.state.position, tp.kind});
  }
  return out;
}

std::vector<double> errors_against_truth(std::span<const ScoredPoint> est,
                                         std::span<const GroundTruthSample> gt,
                                         ErrorMode mode) {
  std::vector<double> errors;
  errors.reserve(est.size());
  for (const ScoredPoint& e : est) {
    if (gt.size() < 2 || e.timestamp < gt.front().timestamp ||
        e.timestamp > gt.back().timestamp) {
      continue;
    }
    const Eigen::Vector3d truth = align_ground_truth(gt, e.timestamp).vec();
    const Eigen::Vector3d d = e.position - truth;
    errors.push_back(mode == ErrorMode::Horizontal2D ? d.head<2>().norm() : d.norm());
  }
  return errors;
}

namespace {

ErrorStats stats_of(const std::vector<double>& errors,
                    const std::vector<double>& timestamps,
                    std::pair<double, double> span_t, double bin_s) {
  ErrorStats s;
  s.count = static_cast<int>(errors.size());
  if (errors.empty()) return s;
  s.min_m = *std::min_element(errors.begin(), errors.end());
  s.max_m = *std::max_element(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean_m = sum / s.count;
  if (s.count > 1) {
    double acc = 0.0;
    for (double e : errors) acc += (e - s.mean_m) * (e - s.mean_m);
    s.std_m = std::sqrt(acc / (s.count - 1));
  }
  s.coverage_pct = coverage(timestamps, span_t, bin_s);
  return s;
}

}  // namespace

ErrorReport error_stats(std::span<const ScoredPoint> est,
                        std::span<const GroundTruthSample> gt, ErrorMode mode,
                        double coverage_bin_s) {
  if (gt.size() < 2) {
    throw InsufficientDataError("ground truth needs at least two samples");
  }
  std::vector<double> all_err, upd_err, coast_err;
  std::vector<double> all_t, upd_t, coast_t;
  int excluded = 0;
  for (const ScoredPoint& e : est) {
    if (e.timestamp < gt.front().timestamp || e.timestamp > gt.back().timestamp) {
      ++excluded;
      continue;
    }
    const Eigen::Vector3d truth = align_ground_truth(gt, e.timestamp).vec();
    const Eigen::Vector3d d = e.position - truth;
    const double err = mode == ErrorMode::Horizontal2D ? d.head<2>().norm() : d.norm();
    all_err.push_back(err);
    all_t.push_back(e.timestamp);
    if (e.kind == StepKind::Coasted) {
      coast_err.push_back(err);
      coast_t.push_back(e.timestamp);
    } else {
      upd_err.push_back(err);
      upd_t.push_back(e.timestamp);
    }
  }
  if (all_err.empty()) {
    throw InsufficientDataError("no estimates alignable to ground truth");
  }

  const std::pair<double, double> span_t{gt.front().timestamp, gt.back().timestamp};
  ErrorReport report;
  report.excluded = excluded;
  report.overall = stats_of(all_err, all_t, span_t, coverage_bin_s);
  if (!upd_err.empty()) {
    report.updated = stats_of(upd_err, upd_t, span_t, coverage_bin_s);
  }
  if (!coast_err.empty()) {
    report.coasted = stats_of(coast_err, coast_t, span_t, coverage_bin_s);
  }
  return report;
}

double coverage(std::span<const double> timestamps,
                std::pair<double, double> span_t, double bin_s) {
  if (!(span_t.second > span_t.first)) {
    throw InputError("coverage: span must have positive length");
  }
  if (!(bin_s > 0.0)) {
    throw InputError("coverage: bin width must be positive");
  }
  const int n_bins = static_cast<int>(
      std::ceil((span_t.second - span_t.first) / bin_s - 1e-12));
  std::vector<char> hit(n_bins, 0);
  for (double t : timestamps) {
    if (t < span_t.first || t > span_t.second) continue;
    int bin = static_cast<int>((t - span_t.first) / bin_s);
    bin = std::min(bin, n_bins - 1);
    hit[bin] = 1;
  }
  const int covered = static_cast<int>(std::count(hit.begin(), hit.end(), 1));
  return 100.0 * covered / n_bins;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> errors) {
  if (errors.empty()) {
    throw InsufficientDataError("empirical_cdf needs at least one value");
  }
  std::sort(errors.begin(), errors.end());
  std::vector<std::pair<double, double>> cdf;
  cdf.reserve(errors.size());
  const double n = static_cast<double>(errors.size());
  for (size_t k = 0; k < errors.size(); ++k) {
    cdf.emplace_back(errors[k], (k + 1) / n);
  }
  return cdf;
}

ConsistencySummary consistency_report(std::span<const TrackPoint> track,
                                      std::span<const GroundTruthSample> gt) {
  ConsistencySummary summary;
  const double lo = 0.21579528262389785;  // chi2 2.5% / 97.5% quantiles, 3 dof
  const double hi = 9.348403604496148;
  double sum = 0.0;
  int in_band = 0;
  for (const TrackPoint& tp : track) {
    if (gt.size() < 2 || tp.timestamp < gt.front().timestamp ||
        tp.timestamp > gt.back().timestamp) {
      continue;
    }
    const Eigen::Matrix3d p = tp.covariance.topLeftCorner<3, 3>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(p);
    const double max_ev = eig.eigenvalues().maxCoeff();
    if (!(max_ev > 0.0) || eig.eigenvalues().minCoeff() / max_ev < 1e-12) {
      ++summary.flagged;
      continue;
    }
    const Eigen::Vector3d e =
        tp.state.position - align_ground_truth(gt, tp.timestamp).vec();
    const double nees = e.dot(p.ldlt().solve(e));
    summary.nees.emplace_back(tp.timestamp, nees);
    sum += nees;
    if (nees >= lo && nees <= hi) ++in_band;
  }
  if (!summary.nees.empty()) {
    summary.mean_nees = sum / summary.nees.size();
    summary.fraction_in_band = static_cast<double>(in_band) / summary.nees.size();
  }
  return summary;
}

}  // namespace uavfuse

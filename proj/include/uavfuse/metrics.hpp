#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "uavfuse/calib.hpp"
#include "uavfuse/pipeline.hpp"

namespace uavfuse {

enum class ErrorMode { Horizontal2D, Full3D };

struct ErrorStats {
  int count{0};
  double min_m{0.0};
  double max_m{0.0};
  double mean_m{0.0};
  double std_m{0.0};
  double coverage_pct{0.0};
};

struct ErrorReport {
  ErrorStats overall;
  std::optional<ErrorStats> updated;
  std::optional<ErrorStats> coasted;
  int excluded{0};  // estimates outside the truth span
};

/// A positioned estimate to score: either a raw measurement or a track point.
struct ScoredPoint {
  double timestamp{0.0};
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  StepKind kind{StepKind::Updated};
};

std::vector<ScoredPoint> scored_from_measurements(std::span<const Measurement> ms);
std::vector<ScoredPoint> scored_from_track(std::span<const TrackPoint> track);

/// Euclidean error of each estimate against interpolated truth (2D or 3D per
/// mode), with sample std (1/(N-1)) and per-kind breakdown. Coverage is
/// binned over the truth span.
ErrorReport error_stats(std::span<const ScoredPoint> est,
                        std::span<const GroundTruthSample> gt, ErrorMode mode,
                        double coverage_bin_s = 4.0);

/// Percentage of bin_s-wide bins of [span.first, span.second] that contain at
/// least one timestamp.
double coverage(std::span<const double> timestamps,
                std::pair<double, double> span_t, double bin_s);

/// Step CDF: sorted (error, k/N) pairs ending at fraction 1.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> errors);

/// Per-estimate errors against interpolated truth; helper shared by the CDF
/// outputs. Estimates outside the truth span are skipped.
std::vector<double> errors_against_truth(std::span<const ScoredPoint> est,
                                         std::span<const GroundTruthSample> gt,
                                         ErrorMode mode);

struct ConsistencySummary {
  std::vector<std::pair<double, double>> nees;  // (timestamp, value)
  double mean_nees{0.0};
  double fraction_in_band{0.0};  // inside the 95% chi-squared band for 3 dof
  int flagged{0};                // steps excluded for singular covariance
};

/// Position-block NEES e' P^-1 e per track step, against interpolated truth.
ConsistencySummary consistency_report(std::span<const TrackPoint> track,
                                      std::span<const GroundTruthSample> gt);

}  // namespace uavfuse

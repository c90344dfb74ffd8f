#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uavfuse/geo.hpp"
#include "uavfuse/measurement.hpp"

namespace uavfuse {

/// RTK reference position at a timestamp. Series must be strictly increasing
/// in time.
struct GroundTruthSample {
  double timestamp{0.0};
  EnuPosition position;
};

/// Linearly interpolate the truth series at time t. Throws InputError when t
/// falls outside the series span, InsufficientDataError with fewer than two
/// samples.
EnuPosition align_ground_truth(std::span<const GroundTruthSample> gt, double t);

struct CovarianceEstimate {
  Eigen::MatrixXd covariance;  // 2x2 for Rf2D, 3x3 for Radar3D
  Eigen::VectorXd bias;        // mean residual, reported separately
  int sample_count{0};
  int trimmed{0};  // residuals discarded by the robust mode
};

/// Sample covariance of measurement-minus-truth residuals for one modality,
/// with mean subtraction and 1/(N-1) normalization. Measurements outside the
/// truth span are excluded. With robust = true, residuals whose norm exceeds
/// 5x the MAD-scaled typical deviation are trimmed before the covariance is
/// formed, so gross outliers do not inflate the estimate.
CovarianceEstimate estimate_measurement_covariance(
    std::span<const Measurement> ms, std::span<const GroundTruthSample> gt,
    bool robust = false);

}  // namespace uavfuse

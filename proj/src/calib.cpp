#include "uavfuse/calib.hpp"

#include <algorithm>
#include <cmath>

#include "uavfuse/errors.hpp"

namespace uavfuse {

void validate(const Measurement& m) {
  if (m.dim() != measurement_dim(m.modality)) {
    throw InputError("measurement dimension does not match modality");
  }
  if (!m.value.allFinite() || !std::isfinite(m.timestamp)) {
    throw InputError("measurement contains non-finite values");
  }
}

EnuPosition align_ground_truth(std::span<const GroundTruthSample> gt, double t) {
  if (gt.size() < 2) {
    throw InsufficientDataError("ground truth needs at least two samples");
  }
  if (t < gt.front().timestamp || t > gt.back().timestamp) {
    throw InputError("timestamp outside ground-truth span");
  }
  const auto it = std::lower_bound(
      gt.begin(), gt.end(), t,
      [](const GroundTruthSample& s, double value) { return s.timestamp < value; });
  if (it->timestamp == t) return it->position;
  const GroundTruthSample& hi = *it;
  const GroundTruthSample& lo = *(it - 1);
  const double w = (t - lo.timestamp) / (hi.timestamp - lo.timestamp);
  return EnuPosition::from_vec(lo.position.vec() + w * (hi.position.vec() - lo.position.vec()));
}

namespace {

double median(std::vector<double> v) {
  const size_t n = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + n, v.end());
  double m = v[n];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + n));
  }
  return m;
}

}  // namespace

CovarianceEstimate estimate_measurement_covariance(
    std::span<const Measurement> ms, std::span<const GroundTruthSample> gt,
    bool robust) {
  if (ms.empty()) {
    throw InsufficientDataError("no measurements to calibrate from");
  }
  const Modality modality = ms.front().modality;
  const int dim = measurement_dim(modality);

  std::vector<Eigen::VectorXd> residuals;
  residuals.reserve(ms.size());
  for (const Measurement& m : ms) {
    validate(m);
    if (m.modality != modality) {
      throw InputError("mixed modalities in one calibration batch");
    }
    if (gt.size() < 2 || m.timestamp < gt.front().timestamp ||
        m.timestamp > gt.back().timestamp) {
      continue;  // not alignable; excluded rather than extrapolated
    }
    const Eigen::Vector3d truth = align_ground_truth(gt, m.timestamp).vec();
    residuals.push_back(m.value - truth.head(dim));
  }

  int trimmed = 0;
  if (robust && residuals.size() >= 4) {
    std::vector<double> norms;
    norms.reserve(residuals.size());
    for (const auto& r : residuals) norms.push_back(r.norm());
    std::vector<double> dev;
    const double med = median(norms);
    dev.reserve(norms.size());
    for (double n : norms) dev.push_back(std::abs(n - med));
    const double mad = median(dev);
    const double cutoff = med + 5.0 * std::max(1.4826 * mad, 1e-12);
    std::vector<Eigen::VectorXd> kept;
    kept.reserve(residuals.size());
    for (const auto& r : residuals) {
      if (r.norm() <= cutoff) kept.push_back(r);
    }
    trimmed = static_cast<int>(residuals.size() - kept.size());
    residuals = std::move(kept);
  }

  const int n = static_cast<int>(residuals.size());
  if (n < dim + 1) {
    throw InsufficientDataError("too few alignable measurements for covariance");
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& r : residuals) mean += r;
  mean /= n;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& r : residuals) {
    const Eigen::VectorXd d = r - mean;
    cov += d * d.transpose();
  }
  cov /= (n - 1);
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {cov, mean, n, trimmed};
}

}  // namespace uavfuse

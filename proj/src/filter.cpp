#include "uavfuse/filter.hpp"

#include <cmath>
#include <numbers>

#include "uavfuse/errors.hpp"

namespace uavfuse {

namespace {

// Chi-squared CDF for 2 and 3 degrees of freedom in closed form.
double chi2_cdf(int dim, double x) {
  if (x <= 0.0) return 0.0;
  if (dim == 2) return -std::expm1(-0.5 * x);
  return std::erf(std::sqrt(0.5 * x)) -
         std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-0.5 * x);
}

Eigen::MatrixXd measurement_noise(Modality m, const NoiseConfig& noise) {
  if (m == Modality::Radar3D) return noise.r_radar;
  return noise.r_rf;
}

}  // namespace

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Updated: return "updated";
    case StepKind::RejectedByGate: return "rejected";
    case StepKind::Coasted: return "coasted";
  }
  return "unknown";
}

FilterState predict(const FilterState& fs, double dt, const NoiseConfig& noise) {
  if (dt < 0.0) {
    throw InputError("predict: negative dt; process measurements in time order");
  }
  const Matrix6d f = cv_transition(dt);
  FilterState out;
  out.estimate = CvState::from_vector(f * fs.estimate.to_vector());
  const Matrix6d p = f * fs.covariance * f.transpose() + process_noise(dt, noise.sigma_a);
  out.covariance = 0.5 * (p + p.transpose());
  out.timestamp = fs.timestamp + dt;
  return out;
}

double nis(const Eigen::VectorXd& innovation, const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() != innovation.size()) {
    throw InputError("nis: dimension mismatch between innovation and S");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const double max_ev = eig.eigenvalues().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  if (!(max_ev > 0.0) || min_ev / max_ev < 1e-12) {
    throw NumericalError("nis: innovation covariance is numerically singular");
  }
  const double value = innovation.dot(s.ldlt().solve(innovation));
  return std::max(value, 0.0);
}

double chi2_threshold(int dim, double confidence) {
  if (dim != 2 && dim != 3) {
    throw ConfigError("chi2_threshold: dimension must be 2 or 3");
  }
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw ConfigError("chi2_threshold: confidence must lie in (0, 1)");
  }
  if (dim == 2) return -2.0 * std::log1p(-confidence);

  double hi = 1.0;
  while (chi2_cdf(3, hi) < confidence && hi < 1e4) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(3, mid) < confidence ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool gate(double nis_value, int dim, double confidence) {
  return nis_value <= chi2_threshold(dim, confidence);
}

std::pair<FilterState, UpdateOutcome> update(const FilterState& fs,
                                             const Eigen::VectorXd& z,
                                             Modality m,
                                             const NoiseConfig& noise) {
  const int dim = measurement_dim(m);
  if (z.size() != dim) {
    throw InputError("update: measurement dimension does not match modality");
  }
  const Eigen::MatrixXd h = measurement_matrix(m);
  const Eigen::MatrixXd r = measurement_noise(m, noise);
  const Vector6d x = fs.estimate.to_vector();

  const Eigen::VectorXd innovation = z - h * x;
  Eigen::MatrixXd s = h * fs.covariance * h.transpose() + r;
  s = 0.5 * (s + s.transpose()).eval();
  const double nis_value = nis(innovation, s);

  // K = P H' S^-1, computed as (S^-1 H P)' since S is symmetric.
  const Eigen::MatrixXd gain = s.ldlt().solve(h * fs.covariance).transpose();

  FilterState out = fs;
  out.estimate = CvState::from_vector(x + gain * innovation);
  // Joseph form: algebraically equal to (I - KH) P but keeps P symmetric PSD.
  const Matrix6d ikh = Matrix6d::Identity() - gain * h;
  const Matrix6d p = ikh * fs.covariance * ikh.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (p + p.transpose());
  return {out, UpdateOutcome{StepKind::Updated, nis_value, innovation}};
}

std::pair<FilterState, UpdateOutcome> validated_update(
    const FilterState& fs, const Eigen::VectorXd& z, Modality m,
    const NoiseConfig& noise, double gate_confidence) {
  auto [posterior, outcome] = update(fs, z, m, noise);
  if (gate(outcome.nis, measurement_dim(m), gate_confidence)) {
    return {posterior, outcome};
  }
  return {fs, UpdateOutcome{StepKind::RejectedByGate, outcome.nis, outcome.innovation}};
}

FilterState initialize(const Eigen::VectorXd& first_z, Modality m,
                       const NoiseConfig& noise, double t,
                       const InitOptions& opts) {
  const int dim = measurement_dim(m);
  if (first_z.size() != dim) {
    throw InputError("initialize: measurement dimension does not match modality");
  }
  FilterState fs;
  fs.timestamp = t;
  fs.covariance.setZero();
  if (m == Modality::Radar3D) {
    fs.estimate.position = first_z.head<3>();
    fs.covariance.topLeftCorner<3, 3>() = noise.r_radar * opts.position_r_inflation;
  } else {
    fs.estimate.position = {first_z(0), first_z(1), opts.rf_seed_altitude_m};
    fs.covariance.topLeftCorner<2, 2>() = noise.r_rf * opts.position_r_inflation;
    fs.covariance(2, 2) = opts.seeded_altitude_variance;
  }
  fs.estimate.velocity.setZero();
  fs.covariance.bottomRightCorner<3, 3>() =
      Eigen::Matrix3d::Identity() * opts.velocity_variance;
  return fs;
}

}  // namespace uavfuse

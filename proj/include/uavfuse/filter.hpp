#pragma once

#include <utility>

#include <Eigen/Dense>

#include "uavfuse/model.hpp"

namespace uavfuse {

/// Filter state at a point in time. The covariance is kept symmetric by
/// construction; timestamps are epoch-relative seconds and must not decrease
/// across a run.
struct FilterState {
  CvState estimate;
  Covariance6 covariance{Covariance6::Identity()};
  double timestamp{0.0};
};

enum class StepKind { Updated, RejectedByGate, Coasted };

const char* step_kind_name(StepKind k);

struct UpdateOutcome {
  StepKind kind{StepKind::Updated};
  double nis{0.0};
  Eigen::VectorXd innovation;
};

/// Initialization defaults. The paper does not specify filter start-up, so
/// these are documented artifact choices: zero initial velocity with a large
/// variance so velocity becomes observable through successive position
/// updates.
struct InitOptions {
  double rf_seed_altitude_m{0.0};
  double velocity_variance{100.0};       // m^2/s^2 per axis
  double seeded_altitude_variance{1e4};  // m^2, altitude taken from a 2D fix
  double position_r_inflation{10.0};
};

/// Propagate estimate and covariance forward by dt seconds.
FilterState predict(const FilterState& fs, double dt, const NoiseConfig& noise);

/// Unconditional measurement update (Joseph-form covariance). The outcome
/// carries the innovation and its NIS value.
std::pair<FilterState, UpdateOutcome> update(const FilterState& fs,
                                             const Eigen::VectorXd& z,
                                             Modality m,
                                             const NoiseConfig& noise);

/// NIS-gated update: returns the posterior on acceptance, or the input state
/// unchanged (bit for bit) with kind RejectedByGate otherwise.
std::pair<FilterState, UpdateOutcome> validated_update(
    const FilterState& fs, const Eigen::VectorXd& z, Modality m,
    const NoiseConfig& noise, double gate_confidence);

/// Normalized innovation squared, innovation' * S^-1 * innovation.
/// Throws NumericalError when S is singular (reciprocal condition < 1e-12).
double nis(const Eigen::VectorXd& innovation, const Eigen::MatrixXd& s);

/// Inverse chi-squared CDF at `confidence` for dim in {2, 3}.
double chi2_threshold(int dim, double confidence);

/// True iff nis_value lies within the chi-squared confidence region.
bool gate(double nis_value, int dim, double confidence);

/// Build the initial state from the first measurement: position from the fix
/// (altitude seeded from opts for 2D fixes), zero velocity, covariance from
/// the inflated measurement noise.
FilterState initialize(const Eigen::VectorXd& first_z, Modality m,
                       const NoiseConfig& noise, double t,
                       const InitOptions& opts = {});

}  // namespace uavfuse

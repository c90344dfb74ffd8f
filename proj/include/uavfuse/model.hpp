#pragma once

#include <Eigen/Dense>

namespace uavfuse {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Covariance6 = Matrix6d;

/// Sensing modality: 3D radar position fixes or 2D passive-RF fixes.
enum class Modality { Radar3D, Rf2D };

int measurement_dim(Modality m);
const char* modality_name(Modality m);

/// Constant-velocity state, stored in the order x, y, z, vx, vy, vz (ENU).
struct CvState {
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  Eigen::Vector3d velocity{Eigen::Vector3d::Zero()};

  Vector6d to_vector() const;
  static CvState from_vector(const Vector6d& v);
};

/// Process- and measurement-noise parameters for the fusion filter.
struct NoiseConfig {
  double sigma_a{1.0};  // white-acceleration intensity, m/s^2 per axis
  Eigen::Matrix3d r_radar{Eigen::Matrix3d::Identity() * 25.0};  // m^2
  Eigen::Matrix2d r_rf{Eigen::Matrix2d::Identity() * 625.0};    // m^2

  /// Throws ConfigError if sigma_a <= 0 or an R matrix is not symmetric
  /// positive definite.
  void validate() const;
};

/// Constant-velocity transition matrix [[I3, dt*I3], [0, I3]].
Matrix6d cv_transition(double dt);

/// Discrete-time white-acceleration process noise. Per axis the
/// position/velocity block is sigma_a^2 * [[dt^4/4, dt^3/2], [dt^3/2, dt^2]];
/// axes are independent.
Matrix6d process_noise(double dt, double sigma_a);

/// Position-selecting observation matrix: 3x6 for Radar3D, 2x6 for Rf2D.
Eigen::MatrixXd measurement_matrix(Modality m);

}  // namespace uavfuse

#include "uavfuse/model.hpp"

#include <cmath>

#include "uavfuse/errors.hpp"

namespace uavfuse {

int measurement_dim(Modality m) { return m == Modality::Radar3D ? 3 : 2; }

const char* modality_name(Modality m) {
  return m == Modality::Radar3D ? "radar" : "rf";
}

Vector6d CvState::to_vector() const {
  Vector6d v;
  v << position, velocity;
  return v;
}

CvState CvState::from_vector(const Vector6d& v) {
  return {v.head<3>(), v.tail<3>()};
}

namespace {

bool symmetric_positive_definite(const Eigen::MatrixXd& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

void NoiseConfig::validate() const {
  if (!(sigma_a > 0.0) || !std::isfinite(sigma_a)) {
    throw ConfigError("sigma_a must be positive and finite");
  }
  if (!symmetric_positive_definite(r_radar)) {
    throw ConfigError("r_radar must be symmetric positive definite");
  }
  if (!symmetric_positive_definite(r_rf)) {
    throw ConfigError("r_rf must be symmetric positive definite");
  }
}

Matrix6d cv_transition(double dt) {
  if (dt < 0.0) {
    throw InputError("cv_transition: dt must be non-negative");
  }
  Matrix6d f = Matrix6d::Identity();
  f.topRightCorner<3, 3>() = Eigen::Matrix3d::Identity() * dt;
  return f;
}

Matrix6d process_noise(double dt, double sigma_a) {
  if (dt < 0.0) {
    throw InputError("process_noise: dt must be non-negative");
  }
  if (!(sigma_a > 0.0)) {
    throw ConfigError("process_noise: sigma_a must be positive");
  }
  const double var = sigma_a * sigma_a;
  const double q_pp = var * dt * dt * dt * dt / 4.0;
  const double q_pv = var * dt * dt * dt / 2.0;
  const double q_vv = var * dt * dt;
  Matrix6d q = Matrix6d::Zero();
  for (int axis = 0; axis < 3; ++axis) {
    q(axis, axis) = q_pp;
    q(axis, axis + 3) = q_pv;
    q(axis + 3, axis) = q_pv;
    q(axis + 3, axis + 3) = q_vv;
  }
  return q;
}

Eigen::MatrixXd measurement_matrix(Modality m) {
  const int dim = measurement_dim(m);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, 6);
  h.leftCols(dim).setIdentity();
  return h;
}

}  // namespace uavfuse

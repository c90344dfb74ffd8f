#pragma once

#include <optional>

#include <Eigen/Dense>

#include "uavfuse/model.hpp"

namespace uavfuse {

/// One timestamped position fix in the shared ENU frame. Radar fixes are 3D
/// and carry the sensor's track id; RF fixes are 2D (east, north).
struct Measurement {
  double timestamp{0.0};
  Modality modality{Modality::Radar3D};
  Eigen::VectorXd value;
  std::optional<int> track_id;

  int dim() const { return static_cast<int>(value.size()); }
};

/// Throws InputError when the value dimension does not match the modality or
/// contains non-finite entries.
void validate(const Measurement& m);

}  // namespace uavfuse

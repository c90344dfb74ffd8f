#pragma once

#include <stdexcept>

namespace uavfuse {

/// Malformed or out-of-range input data (CLI exit code 2).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Not enough data to produce a result (CLI exit code 3).
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical degeneracy: singular innovation covariance, solver divergence.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace uavfuse

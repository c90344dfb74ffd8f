#pragma once

#include <Eigen/Dense>

namespace uavfuse {

inline constexpr double kWgs84SemiMajorAxisM = 6378137.0;
inline constexpr double kWgs84Flattening = 1.0 / 298.257223563;

/// WGS-84 geodetic coordinate. Altitude is height above the ellipsoid;
/// any geoid correction is the responsibility of dataset adapters.
struct GeodeticCoord {
  double latitude_deg{0.0};
  double longitude_deg{0.0};
  double altitude_m{0.0};
};

/// Position in a local East-North-Up frame. The frame origin is a fixed
/// GeodeticCoord that must be recorded alongside any ENU dataset.
struct EnuPosition {
  double east_m{0.0};
  double north_m{0.0};
  double up_m{0.0};

  Eigen::Vector3d vec() const { return {east_m, north_m, up_m}; }
  static EnuPosition from_vec(const Eigen::Vector3d& v) {
    return {v.x(), v.y(), v.z()};
  }
};

/// Throws InputError if latitude/longitude are outside [-90, 90] / [-180, 180]
/// or any component is non-finite.
void validate(const GeodeticCoord& p);

Eigen::Vector3d geodetic_to_ecef(const GeodeticCoord& p);

GeodeticCoord ecef_to_geodetic(const Eigen::Vector3d& ecef);

/// Full ellipsoidal geodetic -> ECEF -> ENU chain about `origin`.
EnuPosition geodetic_to_enu(const GeodeticCoord& p, const GeodeticCoord& origin);

/// Inverse of geodetic_to_enu; round-trips within 1e-6 m near the origin.
GeodeticCoord enu_to_geodetic(const EnuPosition& p, const GeodeticCoord& origin);

}  // namespace uavfuse

#include "uavfuse/geo.hpp"

#include <cmath>
#include <numbers>

#include "uavfuse/errors.hpp"

namespace uavfuse {

namespace {

constexpr double kEccSq = kWgs84Flattening * (2.0 - kWgs84Flattening);
constexpr double kSemiMinorAxisM = kWgs84SemiMajorAxisM * (1.0 - kWgs84Flattening);

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

// Rows are the east/north/up unit vectors expressed in ECEF.
Eigen::Matrix3d enu_rotation(const GeodeticCoord& origin) {
  const double lat = deg2rad(origin.latitude_deg);
  const double lon = deg2rad(origin.longitude_deg);
  const double slat = std::sin(lat), clat = std::cos(lat);
  const double slon = std::sin(lon), clon = std::cos(lon);
  Eigen::Matrix3d r;
  r << -slon, clon, 0.0,
       -slat * clon, -slat * slon, clat,
       clat * clon, clat * slon, slat;
  return r;
}

}  // namespace

void validate(const GeodeticCoord& p) {
  if (!std::isfinite(p.latitude_deg) || !std::isfinite(p.longitude_deg) ||
      !std::isfinite(p.altitude_m)) {
    throw InputError("geodetic coordinate has non-finite component");
  }
  if (p.latitude_deg < -90.0 || p.latitude_deg > 90.0) {
    throw InputError("latitude outside [-90, 90] degrees");
  }
  if (p.longitude_deg < -180.0 || p.longitude_deg > 180.0) {
    throw InputError("longitude outside [-180, 180] degrees");
  }
}

Eigen::Vector3d geodetic_to_ecef(const GeodeticCoord& p) {
  const double lat = deg2rad(p.latitude_deg);
  const double lon = deg2rad(p.longitude_deg);
  const double slat = std::sin(lat);
  const double n = kWgs84SemiMajorAxisM / std::sqrt(1.0 - kEccSq * slat * slat);
  const double rho = (n + p.altitude_m) * std::cos(lat);
  return {rho * std::cos(lon), rho * std::sin(lon),
          (n * (1.0 - kEccSq) + p.altitude_m) * slat};
}

GeodeticCoord ecef_to_geodetic(const Eigen::Vector3d& ecef) {
  const double a = kWgs84SemiMajorAxisM;
  const double b = kSemiMinorAxisM;
  const double ep2 = kEccSq / (1.0 - kEccSq);
  const double rho = std::hypot(ecef.x(), ecef.y());
  const double lon = std::atan2(ecef.y(), ecef.x());

  if (rho < 1e-9) {  // on the polar axis; longitude is arbitrary
    const double lat = (ecef.z() >= 0.0) ? 90.0 : -90.0;
    return {lat, rad2deg(lon), std::abs(ecef.z()) - b};
  }

  // Bowring's closed-form seed, then a short fixed-point refinement.
  const double theta = std::atan2(ecef.z() * a, rho * b);
  const double st = std::sin(theta), ct = std::cos(theta);
  double lat = std::atan2(ecef.z() + ep2 * b * st * st * st,
                          rho - kEccSq * a * ct * ct * ct);
  double h = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double s = std::sin(lat);
    const double n = a / std::sqrt(1.0 - kEccSq * s * s);
    h = rho / std::cos(lat) - n;
    lat = std::atan2(ecef.z(), rho * (1.0 - kEccSq * n / (n + h)));
  }
  return {rad2deg(lat), rad2deg(lon), h};
}

EnuPosition geodetic_to_enu(const GeodeticCoord& p, const GeodeticCoord& origin) {
  validate(p);
  validate(origin);
  const Eigen::Vector3d delta = geodetic_to_ecef(p) - geodetic_to_ecef(origin);
  return EnuPosition::from_vec(enu_rotation(origin) * delta);
}

GeodeticCoord enu_to_geodetic(const EnuPosition& p, const GeodeticCoord& origin) {
  validate(origin);
  const Eigen::Vector3d v = p.vec();
  if (!v.allFinite()) {
    throw InputError("ENU position has non-finite component");
  }
  const Eigen::Vector3d ecef =
      geodetic_to_ecef(origin) + enu_rotation(origin).transpose() * v;
  return ecef_to_geodetic(ecef);
}

}  // namespace uavfuse

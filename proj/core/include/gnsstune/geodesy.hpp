#pragma once

#include <Eigen/Dense>

namespace gnsstune {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Geodetic {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double height_m = 0.0;
};

/// WGS-84 geodetic to ECEF.
Vec3 geodetic_to_ecef(const Geodetic& g);

/// ECEF to WGS-84 geodetic, fixed-point iteration on latitude.
Geodetic ecef_to_geodetic(const Vec3& r);

/// Rotation whose rows are the local East, North and Up unit vectors
/// expressed in ECEF, i.e. enu = R * (r - r0).
Mat3 ecef_to_enu_rotation(double lat_deg, double lon_deg);

struct AzEl {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
};

/// Azimuth/elevation of `target` seen from `observer` in the observer's
/// local geodetic frame.
AzEl azimuth_elevation(const Vec3& observer, const Vec3& target);

/// Rotation from ECI to ECEF for a frame rotating at `rate` rad/s about z,
/// with the two frames aligned at t = 0.
Mat3 eci_to_ecef_rotation(double t, double rate);

}  // namespace gnsstune

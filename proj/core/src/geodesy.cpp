#include "gnsstune/geodesy.hpp"

#include <cmath>

#include "gnsstune/constants.hpp"

namespace gnsstune {

namespace {
constexpr double kE2 = kEarthFlattening * (2.0 - kEarthFlattening);
}

Vec3 geodetic_to_ecef(const Geodetic& g) {
  const double lat = g.lat_deg * kDegToRad;
  const double lon = g.lon_deg * kDegToRad;
  const double sl = std::sin(lat);
  const double n = kEarthRadius / std::sqrt(1.0 - kE2 * sl * sl);
  return {(n + g.height_m) * std::cos(lat) * std::cos(lon),
          (n + g.height_m) * std::cos(lat) * std::sin(lon),
          (n * (1.0 - kE2) + g.height_m) * sl};
}

Geodetic ecef_to_geodetic(const Vec3& r) {
  const double p = std::hypot(r.x(), r.y());
  const double lon = std::atan2(r.y(), r.x());
  if (p < 1e-9) {
    const double b = kEarthRadius * (1.0 - kEarthFlattening);
    return {r.z() >= 0.0 ? 90.0 : -90.0, 0.0, std::abs(r.z()) - b};
  }
  double lat = std::atan2(r.z(), p * (1.0 - kE2));
  double h = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double sl = std::sin(lat);
    const double n = kEarthRadius / std::sqrt(1.0 - kE2 * sl * sl);
    h = p / std::cos(lat) - n;
    const double next = std::atan2(r.z(), p * (1.0 - kE2 * n / (n + h)));
    const bool done = std::abs(next - lat) < 1e-15;
    lat = next;
    if (done) break;
  }
  return {lat * kRadToDeg, lon * kRadToDeg, h};
}

Mat3 ecef_to_enu_rotation(double lat_deg, double lon_deg) {
  const double lat = lat_deg * kDegToRad;
  const double lon = lon_deg * kDegToRad;
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double so = std::sin(lon), co = std::cos(lon);
  Mat3 r;
  r << -so, co, 0.0,
       -sl * co, -sl * so, cl,
        cl * co, cl * so, sl;
  return r;
}

AzEl azimuth_elevation(const Vec3& observer, const Vec3& target) {
  const Geodetic g = ecef_to_geodetic(observer);
  const Vec3 enu = ecef_to_enu_rotation(g.lat_deg, g.lon_deg) * (target - observer);
  const double horiz = std::hypot(enu.x(), enu.y());
  double az = std::atan2(enu.x(), enu.y()) * kRadToDeg;
  if (az < 0.0) az += 360.0;
  return {az, std::atan2(enu.z(), horiz) * kRadToDeg};
}

Mat3 eci_to_ecef_rotation(double t, double rate) {
  const double th = rate * t;
  const double c = std::cos(th), s = std::sin(th);
  Mat3 r;
  r << c, s, 0.0,
      -s, c, 0.0,
      0.0, 0.0, 1.0;
  return r;
}

}  // namespace gnsstune

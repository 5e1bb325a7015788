#include "gnsstune/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "gnsstune/error.hpp"

namespace gnsstune {

Constellation nominal_constellation() {
  // Plane RAANs and per-slot arguments of latitude of the baseline 24-slot
  // GPS configuration (planes A..F).
  static const double raan[6] = {272.847, 332.847, 32.847, 92.847, 152.847, 212.847};
  static const double arg_lat[6][4] = {
      {268.126, 161.786, 11.676, 41.806},  {80.956, 173.336, 309.976, 204.376},
      {111.876, 11.796, 339.666, 241.556}, {135.226, 265.446, 35.156, 167.356},
      {197.046, 302.596, 66.066, 333.686}, {238.886, 345.226, 105.206, 135.346},
  };
  Constellation out;
  int prn = 1;
  for (int plane = 0; plane < 6; ++plane) {
    for (int slot = 0; slot < 4; ++slot) {
      out.push_back({prn++, 26559.7e3, 55.0, raan[plane], arg_lat[plane][slot]});
    }
  }
  return out;
}

void validate_constellation(const Constellation& constellation) {
  std::set<int> seen;
  for (const auto& s : constellation) {
    if (s.prn < 1 || s.prn > 32) throw ConfigError("PRN out of range: " + std::to_string(s.prn));
    if (!seen.insert(s.prn).second) throw ConfigError("duplicate PRN: " + std::to_string(s.prn));
    if (!(s.semi_major_axis_m > kEarthRadius))
      throw ConfigError("semi-major axis below Earth radius for PRN " + std::to_string(s.prn));
  }
}

EcefState propagate_gps(const GpsSatellite& sat, double t) {
  const double a = sat.semi_major_axis_m;
  const double n = std::sqrt(kEarthMu / (a * a * a));
  const double u = sat.arg_lat_epoch_deg * kDegToRad + n * t;
  const double O = sat.raan_deg * kDegToRad;
  const double i = sat.inclination_deg * kDegToRad;
  const double cu = std::cos(u), su = std::sin(u);
  const double cO = std::cos(O), sO = std::sin(O);
  const double ci = std::cos(i), si = std::sin(i);

  // In-plane unit vectors along the radius and the direction of motion.
  const Vec3 radial(cu * cO - su * ci * sO, cu * sO + su * ci * cO, su * si);
  const Vec3 along(-su * cO - cu * ci * sO, -su * sO + cu * ci * cO, cu * si);

  const Vec3 r_i = a * radial;
  const Vec3 v_i = a * n * along;
  const Vec3 a_i = -a * n * n * radial;

  const Vec3 omega(0.0, 0.0, kEarthRotationRate);
  const Mat3 rot = eci_to_ecef_rotation(t, kEarthRotationRate);
  EcefState e;
  e.t = t;
  e.position = rot * r_i;
  e.velocity = rot * v_i - omega.cross(e.position);
  e.acceleration = rot * a_i - 2.0 * omega.cross(e.velocity) - omega.cross(omega.cross(e.position));
  return e;
}

double geometric_range(const Vec3& rx, const Vec3& sat) { return (sat - rx).norm(); }

LosObservable line_of_sight(const EcefState& rx, const EcefState& sat, int prn) {
  const Vec3 d = sat.position - rx.position;
  const double range = d.norm();
  if (!(range > 0.0)) throw GeometryError("zero range between receiver and satellite");
  const Vec3 u = d / range;
  const Vec3 dv = sat.velocity - rx.velocity;
  const Vec3 da = sat.acceleration - rx.acceleration;

  LosObservable o;
  o.prn = prn;
  o.range = range;
  o.range_rate = dv.dot(u);
  // d^2|d|/dt^2 = (|dv|^2 + d.da - rr^2) / |d|
  o.range_accel = (dv.squaredNorm() + d.dot(da) - o.range_rate * o.range_rate) / range;
  const AzEl ae = azimuth_elevation(rx.position, sat.position);
  o.elevation_deg = ae.elevation_deg;
  o.azimuth_deg = ae.azimuth_deg;
  o.carrier_doppler = -o.range_rate / kL1Wavelength;
  o.code_doppler = o.carrier_doppler / kCarrierToCodeRatio;
  return o;
}

bool clears_earth(const Vec3& rx, const Vec3& sat, double radius) {
  const Vec3 d = sat - rx;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return false;
  // Closest approach of the segment to the Earth's centre.
  const double s = std::clamp(-rx.dot(d) / len2, 0.0, 1.0);
  return (rx + s * d).norm() > radius;
}

std::vector<LosObservable> visible_sats(const EcefState& rx, const Constellation& constellation,
                                        const VisibilityOptions& options, double t) {
  std::vector<LosObservable> out;
  for (const auto& sat : constellation) {
    const EcefState s = propagate_gps(sat, t);
    if (options.rule == VisibilityRule::kEarthLimb) {
      if (!clears_earth(rx.position, s.position)) continue;
      out.push_back(line_of_sight(rx, s, sat.prn));
    } else {
      LosObservable o = line_of_sight(rx, s, sat.prn);
      if (o.elevation_deg < options.mask_deg) continue;
      out.push_back(o);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.prn < b.prn; });
  return out;
}

}  // namespace gnsstune

#pragma once

#include <vector>

#include "gnsstune/dynamics.hpp"

namespace gnsstune {

/// Circular-orbit GPS satellite. Elements are referenced to t = 0, when the
/// ECI and ECEF frames coincide.
struct GpsSatellite {
  int prn = 0;
  double semi_major_axis_m = 26559.7e3;
  double inclination_deg = 55.0;
  double raan_deg = 0.0;
  double arg_lat_epoch_deg = 0.0;
};

using Constellation = std::vector<GpsSatellite>;

/// Nominal 24-slot constellation: 6 planes x 4 slots at a = 26559.7 km,
/// i = 55 deg, with the baseline slot arguments of latitude. PRNs 1..24.
Constellation nominal_constellation();

/// Throws ConfigError on duplicate or out-of-range PRNs.
void validate_constellation(const Constellation& constellation);

EcefState propagate_gps(const GpsSatellite& sat, double t);

struct LosObservable {
  int prn = 0;
  double range = 0.0;          // m
  double range_rate = 0.0;     // m/s
  double range_accel = 0.0;    // m/s^2
  double elevation_deg = 0.0;
  double azimuth_deg = 0.0;
  double carrier_doppler = 0.0;  // Hz
  double code_doppler = 0.0;     // chips/s
};

/// Geometric line-of-sight observables (no light time, no relativistic
/// terms). Throws GeometryError when the two positions coincide.
LosObservable line_of_sight(const EcefState& rx, const EcefState& sat, int prn = 0);

/// Range only; the hot path of the correlator model.
double geometric_range(const Vec3& rx, const Vec3& sat);

/// True when the straight segment rx -> sat clears a sphere of radius
/// `radius` centred at the Earth's centre.
bool clears_earth(const Vec3& rx, const Vec3& sat, double radius = kEarthRadius);

enum class VisibilityRule { kElevationMask, kEarthLimb };

struct VisibilityOptions {
  VisibilityRule rule = VisibilityRule::kElevationMask;
  double mask_deg = 5.0;
};

/// Satellites visible from `rx`, sorted by PRN.
std::vector<LosObservable> visible_sats(const EcefState& rx, const Constellation& constellation,
                                        const VisibilityOptions& options, double t);

}  // namespace gnsstune

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gnsstune/constants.hpp"
#include "gnsstune/geodesy.hpp"

namespace gnsstune {

enum class ScenarioTag { kStatic, kRocket, kLeo };

std::string_view to_string(ScenarioTag tag);
/// Parses "static", "rocket" or "leo"; throws ConfigError otherwise.
ScenarioTag parse_scenario(std::string_view name);

struct EcefState {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

/// Uniformly sampled receiver trajectory in ECEF.
///
/// Between samples the state is reconstructed with quintic Hermite
/// interpolation on position, velocity and acceleration, which keeps the
/// interpolated trajectory C2-continuous. Outside the sampled span the
/// nearest end state is extrapolated with constant acceleration.
class GroundTruth {
 public:
  GroundTruth() = default;
  GroundTruth(double sample_rate, std::vector<EcefState> states, ScenarioTag tag);

  double sample_rate() const { return sample_rate_; }
  ScenarioTag scenario() const { return tag_; }
  const std::vector<EcefState>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  double start_time() const { return states_.front().t; }
  double end_time() const { return states_.back().t; }

  EcefState at(double t) const;

  /// Re-samples onto a uniform grid at `rate` Hz starting at start_time(),
  /// covering [start_time(), end_time()].
  GroundTruth resample(double rate) const;

  /// Keeps samples with t < duration (relative to start_time()).
  GroundTruth truncate(double duration) const;

  /// CSV with header t,x,y,z,vx,vy,vz,ax,ay,az.
  void write_csv(std::ostream& os) const;
  /// Reads write_csv output (extra trailing columns are ignored). Throws
  /// InvalidStateError on a malformed file.
  static GroundTruth read_csv(std::istream& is, ScenarioTag tag);

 private:
  double sample_rate_ = 0.0;
  std::vector<EcefState> states_;
  ScenarioTag tag_ = ScenarioTag::kStatic;
};

/// Piecewise-exponential atmosphere, rho(h) = rho0 * exp(-(h - h0) / H)
/// within each altitude band.
class ExponentialAtmosphere {
 public:
  struct Band {
    double base_altitude_m;
    double base_density;     // kg/m^3
    double scale_height_m;
  };

  explicit ExponentialAtmosphere(std::vector<Band> bands);

  /// Tabulated bands from the surface to 1000 km (Vallado, Table 8-4).
  static ExponentialAtmosphere standard();
  /// Constant density at all altitudes (test helper; 0 disables drag).
  static ExponentialAtmosphere constant(double density);

  double density(double altitude_m) const;

 private:
  std::vector<Band> bands_;
};

struct LeoElements {
  double altitude_m = 417e3;
  double eccentricity = 0.0004413;
  double inclination_deg = 51.6479;
  double arg_perigee_deg = 109.5258;
  double raan_deg = 103.0788;
  double true_anomaly_deg = 31.6858;
};

struct LeoPerturbationParams {
  double j2 = kEarthJ2;
  double re = kEarthRadius;
  double mu = kEarthMu;
  double cd = 2.2;
  double area_m2 = 1641.0;
  double mass_kg = 419725.0;
  ExponentialAtmosphere atmosphere = ExponentialAtmosphere::standard();
};

/// Inertial position/velocity pair.
struct InertialState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

/// J2 perturbing acceleration (ECI). Throws InvalidStateError if the position
/// lies inside the reference sphere.
Vec3 accel_j2(const Vec3& position_eci, const LeoPerturbationParams& params);

/// Drag acceleration from the inertial state, using the velocity relative to
/// an atmosphere co-rotating with the Earth. Altitude is |r| - re.
Vec3 accel_drag(const InertialState& state, const LeoPerturbationParams& params);

/// Two-body + J2 + drag acceleration (ECI).
Vec3 accel_leo(const InertialState& state, const LeoPerturbationParams& params);

/// Osculating elements to an ECI state. The semi-major axis is re + altitude.
InertialState leo_initial_state(const LeoElements& elements, const LeoPerturbationParams& params);

/// Fixed-step RK4 in ECI. Samples are emitted every `output_interval` seconds,
/// from t = 0 up to (not including) `duration`.
std::vector<std::pair<double, InertialState>> propagate_eci(const InertialState& initial,
                                                            const LeoPerturbationParams& params,
                                                            double duration, double step,
                                                            double output_interval);

/// ISS-like LEO ground truth in ECEF, sampled at `output_rate` Hz.
/// Requires step <= 0.1 s; throws PropagationError on a non-finite state.
GroundTruth propagate_leo(const LeoElements& elements, const LeoPerturbationParams& params,
                          double duration = 600.0, double step = 0.1,
                          double output_rate = 20.0);

/// Piecewise-linear thrust curve, zero outside its breakpoints.
class ThrustProfile {
 public:
  ThrustProfile() = default;
  explicit ThrustProfile(std::vector<std::pair<double, double>> points);

  /// Constant-thrust boost with linear ignition ramp and tail-off.
  static ThrustProfile boost(double thrust_n, double burn_time_s, double rise_s, double tail_off_s);

  /// Thrust whose thrust-to-mass ratio follows the piecewise-linear knots
  /// (t, m/s^2), for a mass burning linearly from dry + propellant to dry
  /// between the first and last knot. Sampled every `step_s`.
  static ThrustProfile from_acceleration(const std::vector<std::pair<double, double>>& knots,
                                         double dry_mass_kg, double propellant_mass_kg, double step_s = 0.05);

  double operator()(double t) const;
  double burn_time() const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

struct RocketParams {
  ThrustProfile thrust;
  double dry_mass_kg = 0.0;
  double propellant_mass_kg = 0.0;
  double drag_coefficient = 0.0;
  double reference_area_m2 = 0.0;
  double launch_elevation_deg = 45.0;
  double launch_azimuth_deg = 0.0;
  double rail_length_m = 10.0;
  Geodetic launch_site;
  ExponentialAtmosphere atmosphere = ExponentialAtmosphere::standard();

  double burn_time() const { return thrust.burn_time(); }
  double mass(double t) const;
};

/// Sounding rocket fitted to the target envelope (apogee 5885 m, 875 m/s,
/// 40 g) with a smooth, regressive 8.3 s burn.
RocketParams default_rocket_params();

/// 3-DOF point-mass flight in the launch-site tangent frame (flat Earth,
/// inverse-square gravity), thrust and drag along the velocity vector after
/// the rail. The trajectory is truncated at ground impact.
GroundTruth simulate_rocket(const RocketParams& params, double duration = 70.0, double step = 0.01);

struct RocketSummary {
  double apogee_m = 0.0;
  double max_speed_mps = 0.0;
  double peak_accel_g = 0.0;
  double time_above_4g_s = 0.0;
  double burnout_s = 0.0;
  double flight_time_s = 0.0;
};

RocketSummary summarize_rocket(const GroundTruth& truth, const RocketParams& params);

/// Stationary receiver at a geodetic location sampled at `rate` Hz.
GroundTruth static_truth(const Geodetic& site, double duration = 180.0, double rate = 20.0);

}  // namespace gnsstune

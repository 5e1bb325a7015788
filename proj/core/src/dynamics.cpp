#include "gnsstune/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <string>
#include <ostream>

#include <Eigen/Geometry>

#include "gnsstune/error.hpp"

namespace gnsstune {

std::string_view to_string(ScenarioTag tag) {
  switch (tag) {
    case ScenarioTag::kStatic: return "static";
    case ScenarioTag::kRocket: return "rocket";
    case ScenarioTag::kLeo: return "leo";
  }
  return "unknown";
}

ScenarioTag parse_scenario(std::string_view name) {
  if (name == "static") return ScenarioTag::kStatic;
  if (name == "rocket") return ScenarioTag::kRocket;
  if (name == "leo") return ScenarioTag::kLeo;
  throw ConfigError("unknown scenario '" + std::string(name) + "' (expected static, rocket or leo)");
}

// ---------------------------------------------------------------------------
// GroundTruth

GroundTruth::GroundTruth(double sample_rate, std::vector<EcefState> states, ScenarioTag tag)
    : sample_rate_(sample_rate), states_(std::move(states)), tag_(tag) {
  if (sample_rate_ <= 0.0) throw InvalidStateError("ground truth sample rate must be positive");
  if (states_.empty()) throw InvalidStateError("ground truth has no samples");
}

namespace {

EcefState extrapolate(const EcefState& s, double t) {
  const double dt = t - s.t;
  EcefState out;
  out.t = t;
  out.position = s.position + s.velocity * dt + 0.5 * s.acceleration * dt * dt;
  out.velocity = s.velocity + s.acceleration * dt;
  out.acceleration = s.acceleration;
  return out;
}

}  // namespace

EcefState GroundTruth::at(double t) const {
  if (t <= states_.front().t || states_.size() == 1) return extrapolate(states_.front(), t);
  if (t >= states_.back().t) return extrapolate(states_.back(), t);

  const double dt = 1.0 / sample_rate_;
  auto i = static_cast<std::size_t>((t - states_.front().t) * sample_rate_);
  i = std::min(i, states_.size() - 2);
  const EcefState& a = states_[i];
  const EcefState& b = states_[i + 1];
  if (t == a.t) return a;

  const double h = b.t - a.t > 0.0 ? b.t - a.t : dt;
  const double s = (t - a.t) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;

  // Quintic Hermite basis and its first two derivatives with respect to s.
  const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double h3 = 0.5 * s3 - s4 + 0.5 * s5;
  const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double h5 = 10 * s3 - 15 * s4 + 6 * s5;

  const double d0 = -30 * s2 + 60 * s3 - 30 * s4;
  const double d1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double d2 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
  const double d3 = 1.5 * s2 - 4 * s3 + 2.5 * s4;
  const double d4 = -12 * s2 + 28 * s3 - 15 * s4;
  const double d5 = 30 * s2 - 60 * s3 + 30 * s4;

  const double e0 = -60 * s + 180 * s2 - 120 * s3;
  const double e1 = -36 * s + 96 * s2 - 60 * s3;
  const double e2 = 1 - 9 * s + 18 * s2 - 10 * s3;
  const double e3 = 3 * s - 12 * s2 + 10 * s3;
  const double e4 = -24 * s + 84 * s2 - 60 * s3;
  const double e5 = 60 * s - 180 * s2 + 120 * s3;

  const Vec3 vh0 = a.velocity * h, vh1 = b.velocity * h;
  const Vec3 ah0 = a.acceleration * h * h, ah1 = b.acceleration * h * h;

  EcefState out;
  out.t = t;
  out.position = h0 * a.position + h1 * vh0 + h2 * ah0 + h3 * ah1 + h4 * vh1 + h5 * b.position;
  out.velocity =
      (d0 * a.position + d1 * vh0 + d2 * ah0 + d3 * ah1 + d4 * vh1 + d5 * b.position) / h;
  out.acceleration =
      (e0 * a.position + e1 * vh0 + e2 * ah0 + e3 * ah1 + e4 * vh1 + e5 * b.position) / (h * h);
  return out;
}

GroundTruth GroundTruth::resample(double rate) const {
  const double t0 = start_time();
  const double span = end_time() - t0;
  const auto n = static_cast<std::size_t>(std::floor(span * rate + 1e-9)) + 1;
  std::vector<EcefState> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) / rate;
    // Exact grid hits are copied verbatim.
    const double idx = (t - t0) * sample_rate_;
    const double rounded = std::round(idx);
    if (std::abs(idx - rounded) < 1e-9 && rounded < static_cast<double>(states_.size())) {
      EcefState s = states_[static_cast<std::size_t>(rounded)];
      s.t = t;
      out.push_back(s);
    } else {
      out.push_back(at(t));
    }
  }
  return GroundTruth(rate, std::move(out), tag_);
}

GroundTruth GroundTruth::truncate(double duration) const {
  std::vector<EcefState> out;
  const double t0 = start_time();
  for (const auto& s : states_) {
    if (s.t - t0 < duration - 1e-9) out.push_back(s);
  }
  return GroundTruth(sample_rate_, std::move(out), tag_);
}

void GroundTruth::write_csv(std::ostream& os) const {
  os << "t,x,y,z,vx,vy,vz,ax,ay,az\n";
  os << std::setprecision(15);
  for (const auto& s : states_) {
    os << s.t << ',' << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ','
       << s.velocity.x() << ',' << s.velocity.y() << ',' << s.velocity.z() << ','
       << s.acceleration.x() << ',' << s.acceleration.y() << ',' << s.acceleration.z() << '\n';
  }
}

GroundTruth GroundTruth::read_csv(std::istream& is, ScenarioTag tag) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,x,y,z,vx,vy,vz,ax,ay,az", 0) != 0) {
    throw InvalidStateError("truth CSV: missing or unexpected header");
  }
  std::vector<EcefState> states;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    double v[10];
    const char* p = line.c_str();
    for (int i = 0; i < 10; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(p, &end);
      if (end == p || (i < 9 && *end != ',')) {
        throw InvalidStateError("truth CSV: malformed row at line " + std::to_string(line_no));
      }
      p = end + 1;
    }
    EcefState s;
    s.t = v[0];
    s.position = {v[1], v[2], v[3]};
    s.velocity = {v[4], v[5], v[6]};
    s.acceleration = {v[7], v[8], v[9]};
    states.push_back(s);
  }
  if (states.size() < 2) throw InvalidStateError("truth CSV: need at least two samples");
  const double rate = 1.0 / (states[1].t - states[0].t);
  return GroundTruth(rate, std::move(states), tag);
}

// ---------------------------------------------------------------------------
// Atmosphere

ExponentialAtmosphere::ExponentialAtmosphere(std::vector<Band> bands) : bands_(std::move(bands)) {
  if (bands_.empty()) throw InvalidStateError("atmosphere needs at least one band");
  std::sort(bands_.begin(), bands_.end(),
            [](const Band& a, const Band& b) { return a.base_altitude_m < b.base_altitude_m; });
}

ExponentialAtmosphere ExponentialAtmosphere::standard() {
  // base altitude [km], nominal density [kg/m^3], scale height [km]
  static const double table[][3] = {
      {0, 1.225, 7.249},         {25, 3.899e-2, 6.349},    {30, 1.774e-2, 6.682},
      {40, 3.972e-3, 7.554},     {50, 1.057e-3, 8.382},    {60, 3.206e-4, 7.714},
      {70, 8.770e-5, 6.549},     {80, 1.905e-5, 5.799},    {90, 3.396e-6, 5.382},
      {100, 5.297e-7, 5.877},    {110, 9.661e-8, 7.263},   {120, 2.438e-8, 9.473},
      {130, 8.484e-9, 12.636},   {140, 3.845e-9, 16.149},  {150, 2.070e-9, 22.523},
      {180, 5.464e-10, 29.740},  {200, 2.789e-10, 37.105}, {250, 7.248e-11, 45.546},
      {300, 2.418e-11, 53.628},  {350, 9.518e-12, 53.298}, {400, 3.725e-12, 58.515},
      {450, 1.585e-12, 60.828},  {500, 6.967e-13, 63.822}, {600, 1.454e-13, 71.835},
      {700, 3.614e-14, 88.667},  {800, 1.170e-14, 124.64}, {900, 5.245e-15, 181.05},
      {1000, 3.019e-15, 268.00},
  };
  std::vector<Band> bands;
  for (const auto& row : table) bands.push_back({row[0] * 1e3, row[1], row[2] * 1e3});
  return ExponentialAtmosphere(std::move(bands));
}

ExponentialAtmosphere ExponentialAtmosphere::constant(double density) {
  return ExponentialAtmosphere({{0.0, density, 0.0}});
}

double ExponentialAtmosphere::density(double altitude_m) const {
  const double h = std::max(altitude_m, 0.0);
  auto it = std::upper_bound(bands_.begin(), bands_.end(), h,
                             [](double v, const Band& b) { return v < b.base_altitude_m; });
  const Band& band = it == bands_.begin() ? bands_.front() : *std::prev(it);
  if (band.scale_height_m <= 0.0) return band.base_density;
  return band.base_density * std::exp(-(h - band.base_altitude_m) / band.scale_height_m);
}

// ---------------------------------------------------------------------------
// LEO

Vec3 accel_j2(const Vec3& position_eci, const LeoPerturbationParams& params) {
  const double r = position_eci.norm();
  if (!(r > params.re)) throw InvalidStateError("J2 acceleration requested at or below the reference radius");
  const double x = position_eci.x(), y = position_eci.y(), z = position_eci.z();
  const double z2r2 = z * z / (r * r);
  // Leading minus: yields westward nodal regression for prograde orbits.
  const double k = -1.5 * params.j2 * params.mu * params.re * params.re / std::pow(r, 5);
  return {k * x * (1.0 - 5.0 * z2r2), k * y * (1.0 - 5.0 * z2r2), k * z * (3.0 - 5.0 * z2r2)};
}

Vec3 accel_drag(const InertialState& state, const LeoPerturbationParams& params) {
  const Vec3 omega(0.0, 0.0, kEarthRotationRate);
  const Vec3 v_rel = state.velocity - omega.cross(state.position);
  const double rho = params.atmosphere.density(state.position.norm() - params.re);
  if (rho == 0.0) return Vec3::Zero();
  return -0.5 * (params.cd * params.area_m2 / params.mass_kg) * rho * v_rel.norm() * v_rel;
}

Vec3 accel_leo(const InertialState& state, const LeoPerturbationParams& params) {
  const double r = state.position.norm();
  Vec3 a = -params.mu / (r * r * r) * state.position;
  if (params.j2 != 0.0) a += accel_j2(state.position, params);
  a += accel_drag(state, params);
  return a;
}

InertialState leo_initial_state(const LeoElements& el, const LeoPerturbationParams& params) {
  const double a = params.re + el.altitude_m;
  const double e = el.eccentricity;
  const double p = a * (1.0 - e * e);
  const double nu = el.true_anomaly_deg * kDegToRad;
  const double r = p / (1.0 + e * std::cos(nu));
  const double k = std::sqrt(params.mu / p);

  const Vec3 r_pf(r * std::cos(nu), r * std::sin(nu), 0.0);
  const Vec3 v_pf(-k * std::sin(nu), k * (e + std::cos(nu)), 0.0);

  const double O = el.raan_deg * kDegToRad, i = el.inclination_deg * kDegToRad,
               w = el.arg_perigee_deg * kDegToRad;
  const Mat3 rot = (Eigen::AngleAxisd(O, Vec3::UnitZ()) * Eigen::AngleAxisd(i, Vec3::UnitX()) *
                    Eigen::AngleAxisd(w, Vec3::UnitZ()))
                       .toRotationMatrix();
  return {rot * r_pf, rot * v_pf};
}

namespace {

InertialState rk4_step(const InertialState& s, double h, const LeoPerturbationParams& params) {
  const Vec3 k1v = accel_leo(s, params);
  const Vec3 k1r = s.velocity;
  const InertialState s2{s.position + 0.5 * h * k1r, s.velocity + 0.5 * h * k1v};
  const Vec3 k2v = accel_leo(s2, params);
  const Vec3 k2r = s2.velocity;
  const InertialState s3{s.position + 0.5 * h * k2r, s.velocity + 0.5 * h * k2v};
  const Vec3 k3v = accel_leo(s3, params);
  const Vec3 k3r = s3.velocity;
  const InertialState s4{s.position + h * k3r, s.velocity + h * k3v};
  const Vec3 k4v = accel_leo(s4, params);
  const Vec3 k4r = s4.velocity;
  return {s.position + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
          s.velocity + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

bool finite(const InertialState& s) { return s.position.allFinite() && s.velocity.allFinite(); }

}  // namespace

std::vector<std::pair<double, InertialState>> propagate_eci(const InertialState& initial,
                                                            const LeoPerturbationParams& params,
                                                            double duration, double step,
                                                            double output_interval) {
  if (step <= 0.0 || output_interval <= 0.0) throw InvalidStateError("step sizes must be positive");
  std::vector<std::pair<double, InertialState>> out;
  const auto n_out = static_cast<std::size_t>(std::ceil(duration / output_interval - 1e-9));
  out.reserve(n_out);

  InertialState state = initial;
  double t = 0.0;
  std::size_t k_step = 0;
  for (std::size_t k = 0; k < n_out; ++k) {
    const double t_out = static_cast<double>(k) * output_interval;
    // Advance whole steps until the output time lies inside [t, t + step).
    while (t + step <= t_out + 1e-9) {
      state = rk4_step(state, step, params);
      ++k_step;
      t = static_cast<double>(k_step) * step;
      if (!finite(state)) throw PropagationError("LEO propagation produced a non-finite state");
    }
    const double delta = t_out - t;
    InertialState sample = std::abs(delta) < 1e-12 ? state : rk4_step(state, delta, params);
    if (!finite(sample)) throw PropagationError("LEO propagation produced a non-finite state");
    out.emplace_back(t_out, sample);
  }
  return out;
}

GroundTruth propagate_leo(const LeoElements& elements, const LeoPerturbationParams& params,
                          double duration, double step, double output_rate) {
  if (step > 0.1 + 1e-12) throw InvalidStateError("LEO integration step must be <= 0.1 s");
  const InertialState init = leo_initial_state(elements, params);
  const auto samples = propagate_eci(init, params, duration, step, 1.0 / output_rate);

  const Vec3 omega(0.0, 0.0, kEarthRotationRate);
  std::vector<EcefState> states;
  states.reserve(samples.size());
  for (const auto& [t, s] : samples) {
    const Mat3 rot = eci_to_ecef_rotation(t, kEarthRotationRate);
    EcefState e;
    e.t = t;
    e.position = rot * s.position;
    e.velocity = rot * s.velocity - omega.cross(e.position);
    e.acceleration = rot * accel_leo(s, params) - 2.0 * omega.cross(e.velocity) -
                     omega.cross(omega.cross(e.position));
    states.push_back(e);
  }
  return GroundTruth(output_rate, std::move(states), ScenarioTag::kLeo);
}

// ---------------------------------------------------------------------------
// Rocket

ThrustProfile::ThrustProfile(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].first > points_[i - 1].first))
      throw InvalidStateError("thrust profile breakpoints must be strictly increasing in time");
  }
}

ThrustProfile ThrustProfile::boost(double thrust_n, double burn_time_s, double rise_s, double tail_off_s) {
  if (rise_s <= 0.0 || tail_off_s <= 0.0 || rise_s + tail_off_s >= burn_time_s)
    throw InvalidStateError("boost profile needs 0 < rise, tail-off and rise + tail-off < burn time");
  return ThrustProfile({{0.0, 0.0},
                        {rise_s, thrust_n},
                        {burn_time_s - tail_off_s, thrust_n},
                        {burn_time_s, 0.0}});
}

ThrustProfile ThrustProfile::from_acceleration(const std::vector<std::pair<double, double>>& knots,
                                               double dry_mass_kg, double propellant_mass_kg, double step_s) {
  if (knots.size() < 2 || step_s <= 0.0) throw InvalidStateError("acceleration profile needs two knots");
  const ThrustProfile accel(knots);
  const double t0 = knots.front().first;
  const double tb = knots.back().first;
  std::vector<double> times;
  for (const auto& k : knots) times.push_back(k.first);
  for (double t = t0 + step_s; t < tb; t += step_s) times.push_back(t);
  std::sort(times.begin(), times.end());
  std::vector<std::pair<double, double>> pts;
  for (double t : times) {
    if (!pts.empty() && t - pts.back().first < 1e-6) continue;
    const double m = dry_mass_kg + propellant_mass_kg * (1.0 - (t - t0) / (tb - t0));
    pts.emplace_back(t, accel(t) * m);
  }
  return ThrustProfile(std::move(pts));
}

double ThrustProfile::operator()(double t) const {
  if (points_.empty() || t < points_.front().first || t > points_.back().first) return 0.0;
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double v, const auto& p) { return v < p.first; });
  if (it == points_.end()) return points_.back().second;
  const auto& hi = *it;
  const auto& lo = *std::prev(it);
  const double f = (t - lo.first) / (hi.first - lo.first);
  return lo.second + f * (hi.second - lo.second);
}

double ThrustProfile::burn_time() const { return points_.empty() ? 0.0 : points_.back().first; }

double RocketParams::mass(double t) const {
  const double tb = burn_time();
  if (tb <= 0.0) return dry_mass_kg;
  const double burned = std::clamp(t / tb, 0.0, 1.0);
  return dry_mass_kg + propellant_mass_kg * (1.0 - burned);
}

RocketParams default_rocket_params() {
  RocketParams p;
  p.dry_mass_kg = 30.0;
  p.propellant_mass_kg = 30.0;
  // Thrust-to-mass knots (s, m/s^2) chosen to hit the flight envelope while
  // keeping line-of-sight jerk after the first two seconds below ~90 m/s^3.
  p.thrust = ThrustProfile::from_acceleration({{0.0, 0.0},
                                               {1.40297, 417.74756},
                                               {1.84306, 309.90858},
                                               {3.85194, 273.06427},
                                               {6.47432, 156.12023},
                                               {8.32076, 0.0}},
                                              p.dry_mass_kg, p.propellant_mass_kg);
  p.drag_coefficient = 0.4;
  p.reference_area_m2 = 0.02159 / 0.4;
  p.launch_elevation_deg = 45.0;
  p.launch_azimuth_deg = 220.0;
  p.rail_length_m = 10.0;
  p.launch_site = {37.10, -6.73, 20.0};
  return p;
}

namespace {

struct FlightState {
  Vec3 p = Vec3::Zero();  // ENU, m
  Vec3 v = Vec3::Zero();
};

class RocketModel {
 public:
  explicit RocketModel(const RocketParams& params) : params_(params) {
    const double el = params.launch_elevation_deg * kDegToRad;
    const double az = params.launch_azimuth_deg * kDegToRad;
    rail_ = Vec3(std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el));
  }

  Vec3 accel(double t, const FlightState& s) const {
    const double m = params_.mass(t);
    const double speed = s.v.norm();
    const bool on_rail = s.p.norm() < params_.rail_length_m && s.v.dot(rail_) >= 0.0 &&
                         t <= params_.burn_time();
    const Vec3 dir = (on_rail || speed < 1e-9) ? rail_ : Vec3(s.v / speed);
    const double h = s.p.z();
    const double g = kStandardGravity * std::pow(kEarthRadius / (kEarthRadius + h), 2);
    const double rho = params_.atmosphere.density(h + params_.launch_site.height_m);
    Vec3 a = params_.thrust(t) / m * dir -
             0.5 * rho * params_.drag_coefficient * params_.reference_area_m2 / m * speed * s.v +
             Vec3(0.0, 0.0, -g);
    if (on_rail) {
      // The rail carries the normal load; resting on the pad until thrust
      // overcomes the along-rail weight component.
      const double along = a.dot(rail_);
      if (s.p.norm() < 1e-12 && speed < 1e-12 && along <= 0.0) return Vec3::Zero();
      a = along * rail_;
    }
    return a;
  }

  FlightState step(double t, const FlightState& s, double h) const {
    const Vec3 k1v = accel(t, s), k1p = s.v;
    const FlightState s2{s.p + 0.5 * h * k1p, s.v + 0.5 * h * k1v};
    const Vec3 k2v = accel(t + 0.5 * h, s2), k2p = s2.v;
    const FlightState s3{s.p + 0.5 * h * k2p, s.v + 0.5 * h * k2v};
    const Vec3 k3v = accel(t + 0.5 * h, s3), k3p = s3.v;
    const FlightState s4{s.p + h * k3p, s.v + h * k3v};
    const Vec3 k4v = accel(t + h, s4), k4p = s4.v;
    return {s.p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
            s.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
  }

 private:
  const RocketParams& params_;
  Vec3 rail_;
};

}  // namespace

GroundTruth simulate_rocket(const RocketParams& params, double duration, double step) {
  if (!(params.burn_time() > 0.0)) throw InvalidStateError("rocket burn time must be positive");
  if (!(params.dry_mass_kg > 0.0) || !(params.propellant_mass_kg > 0.0))
    throw InvalidStateError("rocket masses must be positive");

  const RocketModel model(params);
  const Vec3 site = geodetic_to_ecef(params.launch_site);
  const Mat3 to_ecef =
      ecef_to_enu_rotation(params.launch_site.lat_deg, params.launch_site.lon_deg).transpose();

  const auto n = static_cast<std::size_t>(std::llround(duration / step));
  std::vector<EcefState> states;
  states.reserve(n);
  FlightState s;
  bool airborne = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * step;
    if (s.p.z() > 1.0) airborne = true;
    if (airborne && s.p.z() < 0.0) break;  // impact
    if (!s.p.allFinite() || !s.v.allFinite()) throw PropagationError("rocket state became non-finite");
    EcefState e;
    e.t = t;
    e.position = site + to_ecef * s.p;
    e.velocity = to_ecef * s.v;
    e.acceleration = to_ecef * model.accel(t, s);
    states.push_back(e);
    s = model.step(t, s, step);
  }
  return GroundTruth(1.0 / step, std::move(states), ScenarioTag::kRocket);
}

RocketSummary summarize_rocket(const GroundTruth& truth, const RocketParams& params) {
  RocketSummary out;
  const double dt = 1.0 / truth.sample_rate();
  for (const auto& s : truth.states()) {
    const double h = ecef_to_geodetic(s.position).height_m - params.launch_site.height_m;
    out.apogee_m = std::max(out.apogee_m, h);
    out.max_speed_mps = std::max(out.max_speed_mps, s.velocity.norm());
    const double g = s.acceleration.norm() / kStandardGravity;
    out.peak_accel_g = std::max(out.peak_accel_g, g);
    if (g > 4.0) out.time_above_4g_s += dt;
  }
  out.burnout_s = params.burn_time();
  out.flight_time_s = truth.end_time() - truth.start_time() + dt;
  return out;
}

GroundTruth static_truth(const Geodetic& site, double duration, double rate) {
  const Vec3 r = geodetic_to_ecef(site);
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  std::vector<EcefState> states(n);
  for (std::size_t k = 0; k < n; ++k) {
    states[k].t = static_cast<double>(k) / rate;
    states[k].position = r;
  }
  return GroundTruth(rate, std::move(states), ScenarioTag::kStatic);
}

}  // namespace gnsstune

#include "gnsstune/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace gnsstune {

CaCode gen_ca_code(int prn) {
  // G2 phase-selector taps (1-based stage numbers) for PRN 1..32.
  static constexpr int taps[32][2] = {
      {2, 6}, {3, 7}, {4, 8}, {5, 9}, {1, 9}, {2, 10}, {1, 8}, {2, 9},
      {3, 10}, {2, 3}, {3, 4}, {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 10},
      {1, 4}, {2, 5}, {3, 6}, {4, 7}, {5, 8}, {6, 9}, {1, 3}, {4, 6},
      {5, 7}, {6, 8}, {7, 9}, {8, 10}, {1, 6}, {2, 7}, {3, 8}, {4, 9}};
  if (prn < 1 || prn > 32) throw std::out_of_range("C/A PRN must be in [1, 32], got " + std::to_string(prn));

  std::array<int, 10> g1;
  std::array<int, 10> g2;
  g1.fill(1);
  g2.fill(1);
  const int s1 = taps[prn - 1][0] - 1;
  const int s2 = taps[prn - 1][1] - 1;

  CaCode code{};
  for (int i = 0; i < kCaCodeLength; ++i) {
    const int bit = g1[9] ^ g2[s1] ^ g2[s2];
    code[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(bit ? -1 : 1);
    const int f1 = g1[2] ^ g1[9];                                        // 1 + x^3 + x^10
    const int f2 = g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9];        // 1 + x^2+x^3+x^6+x^8+x^9+x^10
    for (int j = 9; j > 0; --j) {
      g1[static_cast<std::size_t>(j)] = g1[static_cast<std::size_t>(j - 1)];
      g2[static_cast<std::size_t>(j)] = g2[static_cast<std::size_t>(j - 1)];
    }
    g1[0] = f1;
    g2[0] = f2;
  }
  return code;
}

double ca_autocorr(double delta_chips) { return std::max(0.0, 1.0 - std::abs(delta_chips)); }

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

int data_bits(double t, std::uint64_t seed) {
  const auto k = static_cast<std::int64_t>(std::floor(t / kDataBitPeriod + 1e-9));
  return (splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k))) & 1U) ? 1 : -1;
}

ChannelTruth::ChannelTruth(int prn, std::shared_ptr<const GroundTruth> receiver, GpsSatellite satellite,
                           double cn0_dbhz, std::uint64_t bit_seed, double bit_sync_time,
                           double carrier_phase_offset)
    : prn_(prn),
      receiver_(std::move(receiver)),
      satellite_(satellite),
      cn0_(cn0_dbhz),
      bit_seed_(bit_seed),
      bit_sync_time_(bit_sync_time),
      phase_offset_(carrier_phase_offset) {}

ChannelTruth::Sample ChannelTruth::sample(double t) const {
  const EcefState rx = receiver_->at(t);
  const EcefState sv = propagate_gps(satellite_, t);
  const Vec3 d = sv.position - rx.position;
  const double range = d.norm();
  const double range_rate = (sv.velocity - rx.velocity).dot(d) / range;
  return {t, range / kChipLength, -range / kL1Wavelength + phase_offset_, -range_rate / kL1Wavelength};
}

LosObservable ChannelTruth::los(double t) const {
  return line_of_sight(receiver_->at(t), propagate_gps(satellite_, t), prn_);
}

void NcoState::advance(double dt) {
  code_phase = std::fmod(code_phase + (kCaChipRate - code_freq) * dt, kCaCodeLength);
  if (code_phase < 0.0) code_phase += kCaCodeLength;
  carrier_phase = carrier_phase + carrier_freq * dt;
  carrier_phase -= std::floor(carrier_phase);
}

double wrap_chips(double delta) {
  double w = std::fmod(delta + 0.5 * kCaCodeLength, kCaCodeLength);
  if (w < 0.0) w += kCaCodeLength;
  return w - 0.5 * kCaCodeLength;
}

double wrap_cycles(double delta) { return delta - std::floor(delta + 0.5); }

double correlator_amplitude(double cn0_dbhz, double t_int) {
  return std::sqrt(2.0 * std::pow(10.0, cn0_dbhz / 10.0) * t_int);
}

CorrelatorOutput correlate(const ChannelTruth& truth, const NcoState& nco, double t, double t_int,
                           double spacing, Rng* noise) {
  return correlate(truth, truth.sample(t), truth.sample(t + t_int), nco, spacing, noise);
}

CorrelatorOutput correlate(const ChannelTruth& truth, const ChannelTruth::Sample& start,
                           const ChannelTruth::Sample& end, const NcoState& nco, double spacing,
                           Rng* noise) {
  const double t = start.t;
  const double T = end.t - start.t;

  // Carrier: phase error at the interval start and mean frequency error.
  const double dphi0 = wrap_cycles(start.phi - nco.carrier_phase);
  const double df = (end.phi - start.phi) / T - nco.carrier_freq;

  // Code: mid-interval delay error.
  const double tau_mid = 0.5 * (start.tau + end.tau);
  const double replica_mid = nco.code_phase + 0.5 * (kCaChipRate - nco.code_freq) * T;
  const double dtau = wrap_chips(tau_mid - replica_mid);

  // Coherent sum over pieces separated by data-bit edges.
  std::complex<double> sum{0.0, 0.0};
  double a = t;
  const double t_end = t + T;
  while (a < t_end - 1e-12) {
    const double next_edge = (std::floor(a / kDataBitPeriod + 1e-9) + 1.0) * kDataBitPeriod;
    const double b = std::min(next_edge, t_end);
    const double len = b - a;
    const double mid = a + 0.5 * len;
    const double phase = kTwoPi * (dphi0 + df * (mid - t));
    sum += static_cast<double>(truth.bit(mid)) * (len / T) * sinc(df * len) *
           std::complex<double>(std::cos(phase), std::sin(phase));
    a = b;
  }

  const double amp = correlator_amplitude(truth.cn0(), T);
  const double re = ca_autocorr(dtau - 0.5 * spacing);
  const double rp = ca_autocorr(dtau);
  const double rl = ca_autocorr(dtau + 0.5 * spacing);

  CorrelatorOutput out;
  out.t_start = t;
  out.t_int = T;
  out.ie = amp * re * sum.real();
  out.qe = amp * re * sum.imag();
  out.ip = amp * rp * sum.real();
  out.qp = amp * rp * sum.imag();
  out.il = amp * rl * sum.real();
  out.ql = amp * rl * sum.imag();
  if (noise != nullptr) {
    // The three arms see the same thermal noise through shifted replicas, so
    // their noise is correlated like the (ideal triangle) code autocorrelation.
    // Lower Cholesky factor of [[1, a, r], [a, 1, a], [r, a, 1]] in P, E, L order.
    const double ca = std::max(0.0, 1.0 - 0.5 * spacing);
    const double cr = std::max(0.0, 1.0 - spacing);
    const double b = std::sqrt(1.0 - ca * ca);
    const double c = (cr - ca * ca) / b;
    const double e = std::sqrt(std::max(0.0, 1.0 - ca * ca - c * c));
    std::normal_distribution<double> n01(0.0, 1.0);
    auto arms = [&](double& pe, double& pp, double& pl) {
      const double z0 = n01(*noise), z1 = n01(*noise), z2 = n01(*noise);
      pp += z0;
      pe += ca * z0 + b * z1;
      pl += ca * z0 + c * z1 + e * z2;
    };
    arms(out.ie, out.ip, out.il);
    arms(out.qe, out.qp, out.ql);
  }
  return out;
}

}  // namespace gnsstune

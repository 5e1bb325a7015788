#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "gnsstune/constellation.hpp"
#include "gnsstune/random.hpp"

namespace gnsstune {

using CaCode = std::array<std::int8_t, kCaCodeLength>;

/// GPS C/A Gold code (chips +/-1, chip 0 first) from the G1 and G2 LFSRs with
/// the PRN-specific G2 phase-selector taps. Throws std::out_of_range for
/// prn outside [1, 32].
CaCode gen_ca_code(int prn);

/// Ideal (infinite-bandwidth) C/A autocorrelation, max(0, 1 - |delta|).
double ca_autocorr(double delta_chips);

/// sin(pi x) / (pi x), with sinc(0) = 1.
double sinc(double x);

/// Navigation data bit (+/-1) at time t: 50 bps, edges on 20 ms boundaries,
/// pseudo-random per seed.
int data_bits(double t, std::uint64_t seed);

/// Received-signal truth for one satellite channel.
class ChannelTruth {
 public:
  struct Sample {
    double t = 0.0;
    double tau = 0.0;      // code delay, chips (unwrapped range / chip length)
    double phi = 0.0;      // carrier phase, cycles
    double doppler = 0.0;  // Hz
  };

  ChannelTruth(int prn, std::shared_ptr<const GroundTruth> receiver, GpsSatellite satellite,
               double cn0_dbhz, std::uint64_t bit_seed, double bit_sync_time,
               double carrier_phase_offset = 0.0);

  int prn() const { return prn_; }
  double cn0() const { return cn0_; }
  double bit_sync_time() const { return bit_sync_time_; }
  const GpsSatellite& satellite() const { return satellite_; }
  const GroundTruth& receiver() const { return *receiver_; }

  Sample sample(double t) const;
  double tau(double t) const { return sample(t).tau; }
  double phi(double t) const { return sample(t).phi; }
  double doppler(double t) const { return sample(t).doppler; }
  int bit(double t) const { return data_bits(t, bit_seed_); }
  LosObservable los(double t) const;

 private:
  int prn_;
  std::shared_ptr<const GroundTruth> receiver_;
  GpsSatellite satellite_;
  double cn0_;
  std::uint64_t bit_seed_;
  double bit_sync_time_;
  double phase_offset_;
};

/// Replica oscillator state at the start of an integration interval.
struct NcoState {
  double code_phase = 0.0;         // replica code delay, chips, wrapped to [0, 1023)
  double code_freq = kCaChipRate;  // replica chipping rate, chips/s
  double carrier_phase = 0.0;      // cycles, wrapped to [0, 1)
  double carrier_freq = 0.0;       // Doppler estimate, Hz
  double carrier_freq_rate = 0.0;  // Hz/s, loop-filter rate estimate (diagnostic)

  /// Propagates phases over `dt` seconds at the current frequencies.
  void advance(double dt);
};

struct CorrelatorOutput {
  double ie = 0.0, qe = 0.0;
  double ip = 0.0, qp = 0.0;
  double il = 0.0, ql = 0.0;
  double t_start = 0.0;
  double t_int = 0.0;
};

/// Wraps a chip difference into [-511.5, 511.5).
double wrap_chips(double delta);
/// Wraps a cycle difference into [-0.5, 0.5).
double wrap_cycles(double delta);

/// Signal amplitude sqrt(2 * C/N0 * T) for unit-variance correlator noise.
double correlator_amplitude(double cn0_dbhz, double t_int);

/// Semi-analytic Early/Prompt/Late correlation over [t, t + t_int].
///
/// For arm offsets {-spacing/2, 0, +spacing/2} the model is
///   I + jQ = A R(dtau + offset) sum_k d_k (L_k/T) sinc(df L_k) exp(j 2 pi dphi_k) + noise
/// where the interval is split at data-bit edges into pieces of length L_k,
/// dphi_k is the truth-minus-replica phase at the middle of each piece, df
/// the mean frequency error and dtau the mid-interval code delay error.
/// With a single piece this is A d R sinc(df T) [cos, sin](pi df T + 2 pi dphi0).
/// Noise is unit-variance per output, correlated across the early, prompt
/// and late arms by the triangle autocorrelation at their offsets. Pass
/// `noise = nullptr` for the noise-free expectation.
CorrelatorOutput correlate(const ChannelTruth& truth, const NcoState& nco, double t, double t_int,
                           double spacing, Rng* noise);

/// Same model with pre-computed truth samples at the interval edges.
CorrelatorOutput correlate(const ChannelTruth& truth, const ChannelTruth::Sample& start,
                           const ChannelTruth::Sample& end, const NcoState& nco, double spacing,
                           Rng* noise);

}  // namespace gnsstune

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "gnsstune/constellation.hpp"
#include "gnsstune/dynamics.hpp"
#include "gnsstune/tracking.hpp"

namespace gnsstune {

/// Deterministic receiver clock: bias + drift * t, both in metres.
struct ClockModel {
  double bias_m = 0.0;
  double drift_mps = 0.0;

  double bias(double t) const { return bias_m + drift_mps * t; }
};

struct PvtSolution {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double clock_bias = 0.0;   // m
  double clock_drift = 0.0;  // m/s
  int n_sats = 0;
  bool valid = false;
};

struct Measurement {
  int prn = 0;
  double pseudorange = 0.0;       // m
  double pseudorange_rate = 0.0;  // m/s
  EcefState sat_state;
};

/// Tracking state of one channel at a measurement epoch.
struct ChannelSnapshot {
  int prn = 0;
  double code_error = 0.0;  // chips, replica minus truth
  double freq_error = 0.0;  // Hz, estimate minus truth
  bool locked = false;
};

/// Pseudoranges and rates from true geometry plus tracking errors and clock.
/// A code error of +1 chip lengthens the pseudorange by one chip length; a
/// Doppler estimate that is too high by 1 Hz shortens the rate by one
/// wavelength per second. Unlocked channels are skipped.
std::vector<Measurement> form_measurements(const std::vector<ChannelSnapshot>& channels, const EcefState& receiver,
                                           const Constellation& constellation, double t, const ClockModel& clock);

/// Unweighted Gauss-Newton position/bias fix followed by a linear
/// velocity/drift solve. Starts from `prior` when it is valid, else from the
/// Earth's centre. Invalid (no numbers) with fewer than 4 measurements, a
/// rank-deficient geometry or no convergence within 10 iterations.
PvtSolution solve_pvt(const std::vector<Measurement>& measurements, const std::optional<PvtSolution>& prior,
                      double t = 0.0);

/// Receiver environment: everything that is held fixed while loop
/// parameters are tuned.
struct ScenarioEnv {
  ScenarioTag tag = ScenarioTag::kStatic;
  Constellation constellation = nominal_constellation();
  VisibilityOptions visibility;
  double cn0_dbhz = 41.0;
  ClockModel clock;
  ChannelOptions channel;
  /// When set, the per-channel hand-off errors come from this seed instead of
  /// the run seed, so every configuration starts from the same conditions.
  std::optional<std::uint64_t> condition_seed;
  double bit_sync_delay_s = 2.0;
  double pvt_rate_hz = 20.0;
  /// Visibility is sampled at this interval to find channel start/stop times.
  double visibility_step_s = 1.0;
  /// Passes shorter than this are not tracked.
  double min_pass_s = 2.0;
};

ScenarioEnv default_env(ScenarioTag tag);

/// A contiguous visibility interval for one satellite.
struct Pass {
  int prn = 0;
  double start = 0.0;
  double end = 0.0;
};

std::vector<Pass> visibility_passes(const GroundTruth& truth, const ScenarioEnv& env);

struct ReceiverRun {
  std::vector<PvtSolution> solutions;
  std::vector<ChannelOutcome> channels;
};

/// End-to-end closed loop: one channel per visibility pass, measurements and
/// PVT at env.pvt_rate_hz on the truth grid. Channels are independent and
/// run on up to `threads` workers; the result does not depend on `threads`.
ReceiverRun run_receiver(std::shared_ptr<const GroundTruth> truth, const LoopConfig& cfg, const ScenarioEnv& env,
                         std::uint64_t seed, unsigned threads = 1);

/// CSV: t,x,y,z,vx,vy,vz,clock_bias,clock_drift,n_sats,valid
void write_pvt_csv(std::ostream& os, const std::vector<PvtSolution>& solutions);

}  // namespace gnsstune

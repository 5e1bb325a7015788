#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gnsstune/dynamics.hpp"
#include "gnsstune/signal.hpp"

namespace gnsstune {

inline constexpr double kPllNarrowMin = 5.0;  // Hz, narrow value at 0 %
inline constexpr double kDllNarrowMin = 1.0;  // Hz
/// Loops with bandwidth * t_int at or above this are rejected.
inline constexpr double kStabilityGuard = 0.4;

/// The eight tunable tracking parameters.
struct LoopConfig {
  int t_int_ms = 1;
  double pll_bw = 5.0;
  double pll_narrow_pct = 0.0;
  int pll_order = 2;
  double dll_bw = 1.0;
  double dll_narrow_pct = 0.0;
  int dll_order = 1;
  double fll_bw = 1.0;

  double t_int() const { return t_int_ms * 1e-3; }
  double pll_narrow() const;
  double dll_narrow() const;

  bool operator==(const LoopConfig&) const = default;
};

/// Throws ConfigError if any field lies outside its allowed range.
void validate(const LoopConfig& cfg);

/// Optimum configuration reported for each scenario.
LoopConfig preset_config(ScenarioTag tag);

std::string describe(const LoopConfig& cfg);

/// range_min + pct/100 * (pull_in - range_min). Throws ConfigError for pct
/// outside [0, 100] or pull_in < range_min.
double narrow_bandwidth(double pull_in, double pct, double range_min);

struct Discriminator {
  double value = 0.0;
  bool degenerate = false;
};

/// Normalized noncoherent early-minus-late envelope, chips.
Discriminator dll_discriminator(const CorrelatorOutput& out);
/// Costas atan(Q/I) in (-pi/2, pi/2], rad.
Discriminator pll_discriminator(const CorrelatorOutput& out);
/// Cross/dot product frequency discriminator, Hz.
Discriminator fll_discriminator(const CorrelatorOutput& prev, const CorrelatorOutput& curr, double t_int);

/// Natural frequency (rad/s) for a loop of the given order and noise bandwidth.
double natural_frequency(int order, double bandwidth_hz);

/// FLL branch feeding a carrier loop filter, one order below the PLL.
struct FllAssist {
  int order = 1;
  double bandwidth = 0.0;
  double omega0 = 0.0;
};

/// Digital loop filter with trapezoidal integrators. Input and output are
/// in loop units (rad, rad/s for the carrier; chips, chips/s for code).
class LoopFilter {
 public:
  LoopFilter() = default;

  int order() const { return order_; }
  double bandwidth() const { return bandwidth_; }
  double t_int() const { return t_int_; }
  double omega0() const { return omega0_; }
  double integrator_1() const { return int1_; }
  double integrator_2() const { return int2_; }
  double last_output() const { return output_; }

  /// Changes bandwidth and update interval, keeping the integrator state.
  /// Throws ConfigRejectedError if bandwidth * t_int violates the guard.
  void retune(double bandwidth_hz, double t_int);

  /// Sets the innermost (rate) integrator so a zero-error update outputs `value`.
  void preset_output(double value);

  double update(double error);
  /// Update with an FLL branch. `frequency_error` is in rad/s.
  double update(double error, double frequency_error, const FllAssist& fll);

  friend LoopFilter design_loop_filter(int order, double bandwidth_hz, double t_int);

 private:
  int order_ = 1;
  double bandwidth_ = 0.0;
  double t_int_ = 1e-3;
  double omega0_ = 0.0;
  double int1_ = 0.0;
  double int2_ = 0.0;
  double output_ = 0.0;
};

/// Throws ConfigRejectedError when bandwidth * t_int >= 0.4 and
/// std::invalid_argument for an order outside {1, 2, 3}.
LoopFilter design_loop_filter(int order, double bandwidth_hz, double t_int);
FllAssist design_fll_assist(int pll_order, double bandwidth_hz, double t_int);

/// Sliding-window narrowband power ratio (sum I^2 - sum Q^2) / (sum I^2 + sum Q^2).
class LockDetector {
 public:
  explicit LockDetector(std::size_t window = 100, std::size_t min_epochs = 20, double threshold = 0.6);

  void push(double ip, double qp);
  void clear();
  std::size_t size() const { return history_.size(); }
  double ratio() const;
  bool locked() const;

 private:
  std::size_t window_;
  std::size_t min_epochs_;
  double threshold_;
  std::deque<std::pair<double, double>> history_;
  double sum_i2_ = 0.0;
  double sum_q2_ = 0.0;
};

/// Lock test over (ip, qp) history; uses the newest 100 epochs and needs at least 20.
bool lock_detect(std::span<const std::pair<double, double>> prompt_history);

struct ChannelOptions {
  double spacing = 0.5;
  double init_code_error_chips = 0.25;  // uniform in +/- this
  double init_freq_error_hz = 100.0;
  /// Seed for the hand-off errors; the run seed is used when unset.
  std::optional<std::uint64_t> init_seed;
  /// Bit edges are found from locked prompt samples, so the narrow switch
  /// also waits for this much continuous lock.
  double bit_sync_min_lock_s = 1.0;
  /// Without a confirmed lock this long after start the channel is lost.
  double pull_in_timeout_s = 5.0;
  std::size_t lock_window = 100;
  std::size_t lock_min_epochs = 20;
  double lock_threshold = 0.6;
  /// Lock is dropped when failed detector epochs exceed passed ones by this
  /// many (up/down counter floored at zero). In pull-in the channel then
  /// searches again; after the narrow switch the loss is final.
  int lock_fail_limit = 50;
  /// First lock needs this many consecutive passing detector epochs.
  int lock_confirm_epochs = 50;
  bool noise = true;
  double start_time = 0.0;  // rounded to whole milliseconds
  double end_time = 0.0;
};

struct ChannelState {
  NcoState nco;
  LoopFilter carrier;
  LoopFilter code;
  FllAssist fll;
  LockDetector lock;
  CorrelatorOutput prev;
  bool has_prev = false;
  bool narrow = false;
  int lock_fail_count = 0;
  int lock_pass_run = 0;
  double spacing = 0.5;
  Discriminator last_dll, last_pll, last_fll;
};

/// Initializes the loops in pull-in mode at 1 ms. Throws ConfigRejectedError
/// if either the pull-in or the narrow loop set fails the stability guard.
ChannelState init_channel(const LoopConfig& cfg, const NcoState& nco, const ChannelOptions& options);

/// One epoch update from the correlations just taken with `state.nco`.
/// The caller advances the NCO phases before or after; only frequency
/// commands are written here.
void step_channel(ChannelState& state, const LoopConfig& cfg, const CorrelatorOutput& out);

/// Switches to the narrow loop set at the configured integration time.
void enter_narrow_mode(ChannelState& state, const LoopConfig& cfg);

struct EpochRecord {
  double t = 0.0;  // end of the integration interval
  double code_error = 0.0;  // replica minus truth, chips
  double freq_error = 0.0;  // estimate minus truth, Hz
  double carrier_freq = 0.0;
  double dll = 0.0;
  double pll = 0.0;
  double fll = 0.0;
  double lock_ratio = 0.0;
  bool locked = false;
  bool narrow = false;
};

struct ChannelOutcome {
  int prn = 0;
  double start_time = 0.0;
  double end_time = 0.0;
  std::optional<double> first_lock_time;
  std::optional<double> bit_sync_time;
  std::optional<double> loss_of_lock_time;
  bool rejected = false;
  std::string reject_reason;
};

struct ChannelTrack : ChannelOutcome {
  std::vector<EpochRecord> epochs;

  /// CSV with a header row; one line per epoch.
  void write_csv(std::ostream& os) const;
};

using EpochObserver = std::function<void(const EpochRecord&)>;

/// Closed-loop run over [options.start_time, options.end_time]. Epochs are
/// 1 ms with the pull-in loops until the truth's bit_sync_time has passed
/// with the lock detector up; at the next bit edge the channel switches to
/// the narrow loops and cfg.t_int_ms epochs. Each epoch
/// record is passed to `observer`. Loss of lock is terminal: the run stops
/// after emitting the epoch at which it was declared.
ChannelOutcome run_channel(const ChannelTruth& truth, const LoopConfig& cfg, std::uint64_t seed,
                           const ChannelOptions& options, const EpochObserver& observer);

/// Same, collecting every `decimation`-th epoch record.
ChannelTrack run_channel(const ChannelTruth& truth, const LoopConfig& cfg, std::uint64_t seed,
                         const ChannelOptions& options, std::size_t decimation = 1);

}  // namespace gnsstune

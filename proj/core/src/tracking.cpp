#include "gnsstune/tracking.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gnsstune/error.hpp"

namespace gnsstune {

namespace {

constexpr double kA2 = 1.414;
constexpr double kA3 = 1.1;
constexpr double kB3 = 2.4;

void check_guard(double bandwidth_hz, double t_int) {
  if (!(bandwidth_hz > 0.0) || !(t_int > 0.0)) {
    throw std::invalid_argument("loop bandwidth and update interval must be positive");
  }
  if (bandwidth_hz * t_int >= kStabilityGuard) {
    std::ostringstream os;
    os << "loop bandwidth " << bandwidth_hz << " Hz at " << t_int * 1e3 << " ms fails Bn*T < " << kStabilityGuard;
    throw ConfigRejectedError(os.str());
  }
}

}  // namespace

double LoopConfig::pll_narrow() const { return narrow_bandwidth(pll_bw, pll_narrow_pct, kPllNarrowMin); }
double LoopConfig::dll_narrow() const { return narrow_bandwidth(dll_bw, dll_narrow_pct, kDllNarrowMin); }

void validate(const LoopConfig& cfg) {
  auto fail = [](const std::string& what) { throw ConfigError("loop config: " + what); };
  if (cfg.t_int_ms < 1 || cfg.t_int_ms > 20) fail("t_int must be in [1, 20] ms");
  if (!(cfg.pll_bw >= 5.0 && cfg.pll_bw <= 80.0)) fail("pll_bw must be in [5, 80] Hz");
  if (!(cfg.pll_narrow_pct >= 0.0 && cfg.pll_narrow_pct <= 100.0)) fail("pll_narrow_pct must be in [0, 100]");
  if (cfg.pll_order != 2 && cfg.pll_order != 3) fail("pll_order must be 2 or 3");
  if (!(cfg.dll_bw >= 1.0 && cfg.dll_bw <= 50.0)) fail("dll_bw must be in [1, 50] Hz");
  if (!(cfg.dll_narrow_pct >= 0.0 && cfg.dll_narrow_pct <= 100.0)) fail("dll_narrow_pct must be in [0, 100]");
  if (cfg.dll_order < 1 || cfg.dll_order > 3) fail("dll_order must be 1, 2 or 3");
  if (!(cfg.fll_bw >= 1.0 && cfg.fll_bw <= 50.0)) fail("fll_bw must be in [1, 50] Hz");
}

LoopConfig preset_config(ScenarioTag tag) {
  switch (tag) {
    case ScenarioTag::kStatic: return {10, 5.0, 0.0, 2, 1.0, 0.0, 3, 1.0};
    case ScenarioTag::kRocket: return {1, 27.0, 50.0, 3, 1.0, 0.0, 1, 15.0};
    case ScenarioTag::kLeo: return {1, 6.0, 0.0, 3, 1.0, 0.0, 1, 1.0};
  }
  return {};
}

std::string describe(const LoopConfig& cfg) {
  std::ostringstream os;
  os << "t_int=" << cfg.t_int_ms << "ms pll=" << cfg.pll_bw << "Hz/" << cfg.pll_narrow_pct << "%/o"
     << cfg.pll_order << " dll=" << cfg.dll_bw << "Hz/" << cfg.dll_narrow_pct << "%/o" << cfg.dll_order
     << " fll=" << cfg.fll_bw << "Hz";
  return os.str();
}

double narrow_bandwidth(double pull_in, double pct, double range_min) {
  if (!(pct >= 0.0 && pct <= 100.0)) throw ConfigError("narrow bandwidth percent must be in [0, 100]");
  if (pull_in < range_min) throw ConfigError("pull-in bandwidth below the narrow range minimum");
  return range_min + pct / 100.0 * (pull_in - range_min);
}

Discriminator dll_discriminator(const CorrelatorOutput& out) {
  const double e = std::hypot(out.ie, out.qe);
  const double l = std::hypot(out.il, out.ql);
  if (e + l == 0.0) return {0.0, true};
  return {0.5 * (e - l) / (e + l), false};
}

Discriminator pll_discriminator(const CorrelatorOutput& out) {
  if (out.ip == 0.0) {
    if (out.qp == 0.0) return {0.0, true};
    return {kPi / 2.0, false};
  }
  return {std::atan(out.qp / out.ip), false};
}

Discriminator fll_discriminator(const CorrelatorOutput& prev, const CorrelatorOutput& curr, double t_int) {
  const double cross = prev.ip * curr.qp - curr.ip * prev.qp;
  const double dot = prev.ip * curr.ip + prev.qp * curr.qp;
  if (cross == 0.0 && dot == 0.0) return {0.0, true};
  return {std::atan2(cross, dot) / (kTwoPi * t_int), false};
}

double natural_frequency(int order, double bandwidth_hz) {
  switch (order) {
    case 1: return 4.0 * bandwidth_hz;
    case 2: return bandwidth_hz / 0.53;
    case 3: return bandwidth_hz / 0.7845;
    default: throw std::invalid_argument("loop order must be 1, 2 or 3");
  }
}

LoopFilter design_loop_filter(int order, double bandwidth_hz, double t_int) {
  LoopFilter f;
  f.order_ = order;
  natural_frequency(order, 1.0);
  f.retune(bandwidth_hz, t_int);
  return f;
}

FllAssist design_fll_assist(int pll_order, double bandwidth_hz, double t_int) {
  if (pll_order != 2 && pll_order != 3) throw std::invalid_argument("FLL assist needs a PLL of order 2 or 3");
  check_guard(bandwidth_hz, t_int);
  const int order = pll_order - 1;
  return {order, bandwidth_hz, natural_frequency(order, bandwidth_hz)};
}

void LoopFilter::retune(double bandwidth_hz, double t_int) {
  check_guard(bandwidth_hz, t_int);
  bandwidth_ = bandwidth_hz;
  t_int_ = t_int;
  omega0_ = natural_frequency(order_, bandwidth_hz);
}

void LoopFilter::preset_output(double value) {
  if (order_ == 2) int1_ = value;
  if (order_ == 3) int2_ = value;
  output_ = value;
}

double LoopFilter::update(double error) { return update(error, 0.0, FllAssist{order_ - 1, 0.0, 0.0}); }

double LoopFilter::update(double error, double frequency_error, const FllAssist& fll) {
  const double T = t_int_;
  const double w = omega0_;
  const double wf = fll.omega0;
  switch (order_) {
    case 1:
      output_ = w * error;
      break;
    case 2: {
      const double next = int1_ + T * (w * w * error + wf * frequency_error);
      output_ = 0.5 * (next + int1_) + kA2 * w * error;
      int1_ = next;
      break;
    }
    case 3: {
      const double next1 = int1_ + T * (w * w * w * error + wf * wf * frequency_error);
      const double next2 = int2_ + T * (0.5 * (next1 + int1_) + kA3 * w * w * error + kA2 * wf * frequency_error);
      output_ = 0.5 * (next2 + int2_) + kB3 * w * error;
      int1_ = next1;
      int2_ = next2;
      break;
    }
    default:
      break;
  }
  return output_;
}

LockDetector::LockDetector(std::size_t window, std::size_t min_epochs, double threshold)
    : window_(window), min_epochs_(min_epochs), threshold_(threshold) {}

void LockDetector::push(double ip, double qp) {
  history_.emplace_back(ip * ip, qp * qp);
  sum_i2_ += ip * ip;
  sum_q2_ += qp * qp;
  if (history_.size() > window_) {
    sum_i2_ -= history_.front().first;
    sum_q2_ -= history_.front().second;
    history_.pop_front();
  }
}

void LockDetector::clear() {
  history_.clear();
  sum_i2_ = sum_q2_ = 0.0;
}

double LockDetector::ratio() const {
  const double total = sum_i2_ + sum_q2_;
  return total > 0.0 ? (sum_i2_ - sum_q2_) / total : 0.0;
}

bool LockDetector::locked() const { return history_.size() >= min_epochs_ && ratio() > threshold_; }

bool lock_detect(std::span<const std::pair<double, double>> prompt_history) {
  LockDetector det;
  const std::size_t n = prompt_history.size();
  for (std::size_t k = n > 100 ? n - 100 : 0; k < n; ++k) det.push(prompt_history[k].first, prompt_history[k].second);
  return det.locked();
}

ChannelState init_channel(const LoopConfig& cfg, const NcoState& nco, const ChannelOptions& options) {
  // Narrow loops are checked up front so a rejected configuration fails at
  // channel start rather than at bit sync.
  design_loop_filter(cfg.pll_order, cfg.pll_narrow(), cfg.t_int());
  design_loop_filter(cfg.dll_order, cfg.dll_narrow(), cfg.t_int());

  ChannelState st;
  st.nco = nco;
  st.carrier = design_loop_filter(cfg.pll_order, cfg.pll_bw, 1e-3);
  st.code = design_loop_filter(cfg.dll_order, cfg.dll_bw, 1e-3);
  st.fll = design_fll_assist(cfg.pll_order, cfg.fll_bw, 1e-3);
  st.carrier.preset_output(kTwoPi * nco.carrier_freq);
  st.lock = LockDetector(options.lock_window, options.lock_min_epochs, options.lock_threshold);
  st.spacing = options.spacing;
  return st;
}

void step_channel(ChannelState& state, const LoopConfig& cfg, const CorrelatorOutput& out) {
  (void)cfg;
  state.last_dll = dll_discriminator(out);
  state.last_pll = pll_discriminator(out);

  double omega;
  if (!state.narrow) {
    if (state.has_prev) {
      // Before bit sync the data sign is unknown; align the previous prompt
      // with the current one so bit flips do not read as half-cycle slips.
      CorrelatorOutput prev = state.prev;
      if (prev.ip * out.ip + prev.qp * out.qp < 0.0) {
        prev.ip = -prev.ip;
        prev.qp = -prev.qp;
      }
      state.last_fll = fll_discriminator(prev, out, out.t_int);
    } else {
      state.last_fll = {0.0, true};
    }
    omega = state.carrier.update(state.last_pll.value, kTwoPi * state.last_fll.value, state.fll);
  } else {
    state.last_fll = {0.0, false};
    omega = state.carrier.update(state.last_pll.value);
  }
  state.nco.carrier_freq = omega / kTwoPi;
  state.nco.carrier_freq_rate = state.carrier.order() == 3 ? state.carrier.integrator_1() / kTwoPi : 0.0;

  // Unit-slope code error: the discriminator gain at the origin is 1/(2 - spacing).
  const double code_rate = state.code.update(state.last_dll.value * (2.0 - state.spacing));
  state.nco.code_freq = kCaChipRate + state.nco.carrier_freq / kCarrierToCodeRatio - code_rate;

  state.lock.push(out.ip, out.qp);
  state.prev = out;
  state.has_prev = true;
}

void enter_narrow_mode(ChannelState& state, const LoopConfig& cfg) {
  state.carrier.retune(cfg.pll_narrow(), cfg.t_int());
  state.code.retune(cfg.dll_narrow(), cfg.t_int());
  state.narrow = true;
  state.has_prev = false;
}

void ChannelTrack::write_csv(std::ostream& os) const {
  os << "t,code_error_chips,freq_error_hz,carrier_freq_hz,dll_chips,pll_rad,fll_hz,lock_ratio,locked,narrow\n";
  os << std::setprecision(10);
  for (const auto& e : epochs) {
    os << e.t << ',' << e.code_error << ',' << e.freq_error << ',' << e.carrier_freq << ',' << e.dll << ','
       << e.pll << ',' << e.fll << ',' << e.lock_ratio << ',' << (e.locked ? 1 : 0) << ',' << (e.narrow ? 1 : 0)
       << '\n';
  }
}

ChannelOutcome run_channel(const ChannelTruth& truth, const LoopConfig& cfg, std::uint64_t seed,
                           const ChannelOptions& options, const EpochObserver& observer) {
  ChannelOutcome oc;
  oc.prn = truth.prn();
  const auto start_ms = static_cast<std::int64_t>(std::llround(options.start_time * 1e3));
  const auto end_ms = static_cast<std::int64_t>(std::llround(options.end_time * 1e3));
  oc.start_time = static_cast<double>(start_ms) * 1e-3;
  oc.end_time = static_cast<double>(end_ms) * 1e-3;

  Rng init_rng(options.init_seed ? *options.init_seed : derive_seed(seed, {0}));
  Rng noise_rng(derive_seed(seed, {1}));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double dtau = options.init_code_error_chips * unit(init_rng);
  const double dfreq = options.init_freq_error_hz * unit(init_rng);
  const double dphase = 0.5 * (unit(init_rng) + 1.0);

  ChannelTruth::Sample s0 = truth.sample(oc.start_time);
  NcoState nco;
  nco.code_phase = std::fmod(s0.tau + dtau, kCaCodeLength);
  if (nco.code_phase < 0.0) nco.code_phase += kCaCodeLength;
  nco.carrier_freq = s0.doppler + dfreq;
  nco.carrier_phase = s0.phi + dphase;
  nco.carrier_phase -= std::floor(nco.carrier_phase);
  nco.code_freq = kCaChipRate + nco.carrier_freq / kCarrierToCodeRatio;

  ChannelState st;
  try {
    st = init_channel(cfg, nco, options);
  } catch (const ConfigRejectedError& e) {
    oc.rejected = true;
    oc.reject_reason = e.what();
    oc.loss_of_lock_time = oc.start_time;
    return oc;
  }

  std::int64_t t_ms = start_ms;
  std::int64_t step_ms = 1;
  bool sync_pending = false;
  Rng* noise = options.noise ? &noise_rng : nullptr;
  bool have_lock = false;
  std::optional<double> locked_since;

  while (t_ms + step_ms <= end_ms) {
    const double T = static_cast<double>(step_ms) * 1e-3;
    const ChannelTruth::Sample s1 = truth.sample(static_cast<double>(t_ms + step_ms) * 1e-3);
    const CorrelatorOutput out = correlate(truth, s0, s1, st.nco, st.spacing, noise);
    st.nco.advance(T);
    step_channel(st, cfg, out);
    t_ms += step_ms;
    s0 = s1;
    const double t = static_cast<double>(t_ms) * 1e-3;

    EpochRecord rec;
    rec.t = t;
    rec.code_error = wrap_chips(st.nco.code_phase - s1.tau);
    rec.freq_error = st.nco.carrier_freq - s1.doppler;
    rec.carrier_freq = st.nco.carrier_freq;
    rec.dll = st.last_dll.value;
    rec.pll = st.last_pll.value;
    rec.fll = st.last_fll.value;
    rec.lock_ratio = st.lock.ratio();
    rec.narrow = st.narrow;

    const bool finite = std::isfinite(st.nco.carrier_freq) && std::isfinite(st.nco.code_freq) &&
                        std::isfinite(rec.code_error);
    const bool passing = finite && st.lock.locked();
    bool lost = !finite;
    if (!have_lock) {
      st.lock_pass_run = passing ? st.lock_pass_run + 1 : 0;
      if (st.lock_pass_run >= options.lock_confirm_epochs) {
        have_lock = true;
        st.lock_fail_count = 0;
        if (!oc.first_lock_time) oc.first_lock_time = t;
      } else if (t - oc.start_time >= options.pull_in_timeout_s) {
        lost = true;
      }
    } else if (!passing) {
      if (++st.lock_fail_count > options.lock_fail_limit) {
        // Before the hand-off to narrow tracking the channel keeps searching
        // until the pull-in timeout; afterwards the loss is final.
        if (st.narrow || sync_pending) {
          lost = true;
        } else {
          have_lock = false;
          st.lock_pass_run = 0;
        }
      }
    } else if (st.lock_fail_count > 0) {
      --st.lock_fail_count;
    }
    const bool locked = have_lock && !lost;
    rec.locked = locked;
    if (observer) observer(rec);
    if (lost) {
      oc.loss_of_lock_time = t;
      break;
    }

    if (!st.narrow) {
      locked_since = locked ? locked_since.value_or(t) : std::optional<double>{};
      if (!sync_pending && locked && t >= truth.bit_sync_time() - 1e-9 &&
          t - *locked_since >= options.bit_sync_min_lock_s - 1e-9) {
        sync_pending = true;
      }
      if (sync_pending && t_ms % 20 == 0) {
        enter_narrow_mode(st, cfg);
        step_ms = cfg.t_int_ms;
        oc.bit_sync_time = t;
      }
    }
  }
  return oc;
}

ChannelTrack run_channel(const ChannelTruth& truth, const LoopConfig& cfg, std::uint64_t seed,
                         const ChannelOptions& options, std::size_t decimation) {
  ChannelTrack track;
  std::size_t n = 0;
  if (decimation == 0) decimation = 1;
  const ChannelOutcome oc = run_channel(truth, cfg, seed, options, [&](const EpochRecord& r) {
    if (n++ % decimation == 0 || !r.locked) track.epochs.push_back(r);
  });
  static_cast<ChannelOutcome&>(track) = oc;
  return track;
}

}  // namespace gnsstune

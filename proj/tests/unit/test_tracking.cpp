#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "gnsstune/error.hpp"
#include "gnsstune/tracking.hpp"

namespace gnsstune {
namespace {

TEST(NarrowBandwidth, PercentMapping) {
  EXPECT_DOUBLE_EQ(narrow_bandwidth(50.0, 0.0, 5.0), 5.0);
  EXPECT_DOUBLE_EQ(narrow_bandwidth(50.0, 100.0, 5.0), 50.0);
  EXPECT_DOUBLE_EQ(narrow_bandwidth(27.0, 50.0, 5.0), 16.0);
  EXPECT_THROW(narrow_bandwidth(27.0, 120.0, 5.0), ConfigError);
  EXPECT_THROW(narrow_bandwidth(3.0, 50.0, 5.0), ConfigError);
  const LoopConfig rocket = preset_config(ScenarioTag::kRocket);
  EXPECT_DOUBLE_EQ(rocket.pll_narrow(), 16.0);
  EXPECT_DOUBLE_EQ(rocket.dll_narrow(), 1.0);
}

TEST(LoopConfigCheck, RangesAndPresets) {
  for (auto tag : {ScenarioTag::kStatic, ScenarioTag::kRocket, ScenarioTag::kLeo}) {
    EXPECT_NO_THROW(validate(preset_config(tag)));
  }
  LoopConfig c = preset_config(ScenarioTag::kStatic);
  c.pll_order = 1;
  EXPECT_THROW(validate(c), ConfigError);
  c = preset_config(ScenarioTag::kStatic);
  c.fll_bw = 0.5;
  EXPECT_THROW(validate(c), ConfigError);
  c = preset_config(ScenarioTag::kStatic);
  c.t_int_ms = 21;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Discriminators, Dll) {
  CorrelatorOutput o;
  o.ie = o.il = 3.0;
  EXPECT_DOUBLE_EQ(dll_discriminator(o).value, 0.0);
  EXPECT_TRUE(dll_discriminator(CorrelatorOutput{}).degenerate);
}

TEST(Discriminators, CostasPll) {
  CorrelatorOutput o;
  o.ip = 2.0;
  EXPECT_DOUBLE_EQ(pll_discriminator(o).value, 0.0);
  o.qp = 2.0;
  EXPECT_NEAR(pll_discriminator(o).value, kPi / 4, 1e-15);
  CorrelatorOutput flipped = o;
  flipped.ip = -o.ip;
  flipped.qp = -o.qp;
  EXPECT_DOUBLE_EQ(pll_discriminator(flipped).value, pll_discriminator(o).value);
  EXPECT_TRUE(pll_discriminator(CorrelatorOutput{}).degenerate);
}

TEST(Discriminators, FllQuarterTurn) {
  CorrelatorOutput a, b;
  a.ip = 5.0;
  b.qp = 5.0;
  EXPECT_NEAR(fll_discriminator(a, b, 1e-3).value, 250.0, 1e-9);
  EXPECT_NEAR(fll_discriminator(a, a, 1e-3).value, 0.0, 1e-12);
}

class ChannelFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    rx_ = std::make_shared<GroundTruth>(static_truth({37.1, -6.73, 20.0}, 200.0, 20.0));
    const Constellation c = nominal_constellation();
    auto vis = visible_sats(rx_->states().front(), c, {}, 0.0);
    ASSERT_FALSE(vis.empty());
    std::sort(vis.begin(), vis.end(), [](const auto& x, const auto& y) { return x.elevation_deg > y.elevation_deg; });
    sat_ = c[static_cast<std::size_t>(vis.front().prn - 1)];
  }
  ChannelTruth truth(double cn0 = 41.0) const { return ChannelTruth(sat_.prn, rx_, sat_, cn0, 11, 2.0); }
  static NcoState aligned(const ChannelTruth& tr, double t) {
    const auto s = tr.sample(t);
    NcoState n;
    n.code_phase = std::fmod(s.tau, 1023.0);
    n.carrier_phase = s.phi - std::floor(s.phi);
    n.carrier_freq = s.doppler;
    n.code_freq = kCaChipRate + s.doppler / kCarrierToCodeRatio;
    return n;
  }
  std::shared_ptr<GroundTruth> rx_;
  GpsSatellite sat_;
};

TEST_F(ChannelFixture, FllMeasuresConstantFrequencyError) {
  const ChannelTruth tr = truth(45.0);
  NcoState n = aligned(tr, 1.0);
  n.carrier_freq -= 30.0;  // truth runs 30 Hz above the replica
  const auto a = correlate(tr, n, 1.0, 1e-3, 0.5, nullptr);
  n.advance(1e-3);
  const auto b = correlate(tr, n, 1.001, 1e-3, 0.5, nullptr);
  EXPECT_NEAR(fll_discriminator(a, b, 1e-3).value, 30.0, 0.3);
}

TEST_F(ChannelFixture, DllSweepIsMonotoneWithPredictedSlope) {
  const ChannelTruth tr = truth(45.0);
  const NcoState base = aligned(tr, 1.0);
  std::vector<double> err, disc;
  for (int k = -20; k <= 20; ++k) {
    NcoState n = base;
    const double shift = 0.01 * k;  // replica delay minus truth
    n.code_phase += shift;
    disc.push_back(dll_discriminator(correlate(tr, n, 1.0, 1e-3, 0.5, nullptr)).value);
    err.push_back(shift);
  }
  // Orientation is fixed by the implementation; monotone either way, same sign everywhere.
  const double sign = disc.back() > disc.front() ? 1.0 : -1.0;
  for (std::size_t i = 1; i < disc.size(); ++i) ASSERT_GT(sign * (disc[i] - disc[i - 1]), 0.0);
  const double slope = std::abs(disc[21] - disc[19]) / 0.02;
  const double predicted = 1.0 / (2.0 - 0.5);  // (E-L)/(E+L)/2 on the triangle
  EXPECT_NEAR(slope / predicted, 1.0, 0.15);
}

TEST(LoopFilterDesign, NaturalFrequencies) {
  EXPECT_DOUBLE_EQ(natural_frequency(1, 2.0), 8.0);
  EXPECT_DOUBLE_EQ(natural_frequency(2, 5.3), 10.0);
  EXPECT_DOUBLE_EQ(natural_frequency(3, 7.845), 10.0);
  EXPECT_THROW(natural_frequency(4, 1.0), std::invalid_argument);
  EXPECT_THROW(design_loop_filter(2, 80.0, 0.005), ConfigRejectedError);
  EXPECT_NO_THROW(design_loop_filter(2, 79.0, 0.005));
  EXPECT_THROW(design_fll_assist(1, 5.0, 1e-3), std::invalid_argument);
  EXPECT_EQ(design_fll_assist(3, 5.0, 1e-3).order, 2);
}

TEST(LoopFilterDesign, ZeroInputZeroOutput) {
  for (int order : {1, 2, 3}) {
    LoopFilter f = design_loop_filter(order, 10.0, 1e-3);
    for (int k = 0; k < 100; ++k) ASSERT_EQ(f.update(0.0), 0.0);
  }
}

/// Closed phase loop: the NCO integrates the filter output.
std::vector<double> closed_loop_error(int order, double bn, double t, const std::vector<double>& input) {
  LoopFilter f = design_loop_filter(order, bn, t);
  double nco = 0.0;
  std::vector<double> err;
  for (double in : input) {
    const double e = in - nco;
    err.push_back(e);
    nco += t * f.update(e);
  }
  return err;
}

TEST(LoopFilterDesign, NoiseBandwidthFromImpulseResponse) {
  // Oracle: Bn = sum h^2 / (2 T) for the closed-loop phase response h.
  const double t = 1e-3;
  for (int order : {1, 2, 3}) {
    for (double bn : {2.0, 10.0}) {
      LoopFilter f = design_loop_filter(order, bn, t);
      double nco = 0.0, sum = 0.0;
      for (int k = 0; k < 200000; ++k) {
        const double in = k == 0 ? 1.0 : 0.0;
        const double e = in - nco;
        nco += t * f.update(e);
        sum += nco * nco;
      }
      EXPECT_NEAR(sum / (2 * t) / bn, 1.0, 0.12) << "order " << order << " Bn " << bn;
    }
  }
}

TEST(LoopFilterDesign, PhaseStepSettles) {
  for (int order : {2, 3}) {
    const auto err = closed_loop_error(order, 15.0, 1e-3, std::vector<double>(3000, 1.0));
    EXPECT_LT(std::abs(err.back()), 1e-4) << order;
  }
}

TEST(LoopFilterDesign, FrequencyStepIsTrackedWithoutBias) {
  const double t = 1e-3, bn = 15.0, f = 50.0;
  std::vector<double> input;
  for (int k = 0; k < 3000; ++k) input.push_back(kTwoPi * f * k * t);
  const auto err = closed_loop_error(2, bn, t, input);
  double peak = 0.0;
  for (double e : err) peak = std::max(peak, std::abs(e));
  EXPECT_LT(std::abs(err.back()), 1e-3 * peak);
  // Within 10 % of the peak after about 4 / Bn.
  const auto settle = static_cast<std::size_t>(4.0 / bn / t);
  for (std::size_t k = settle; k < err.size(); ++k) ASSERT_LT(std::abs(err[k]), 0.1 * peak) << k;
  // First order cannot follow a ramp without a standing error.
  const auto err1 = closed_loop_error(1, bn, t, input);
  EXPECT_NEAR(err1.back(), kTwoPi * f / natural_frequency(1, bn), 1e-3);
}

TEST(LoopFilterDesign, RetuneKeepsIntegrators) {
  LoopFilter f = design_loop_filter(3, 20.0, 1e-3);
  for (int k = 0; k < 50; ++k) f.update(0.1);
  const double i1 = f.integrator_1(), i2 = f.integrator_2();
  f.retune(5.0, 0.01);
  EXPECT_EQ(f.integrator_1(), i1);
  EXPECT_EQ(f.integrator_2(), i2);
  EXPECT_DOUBLE_EQ(f.bandwidth(), 5.0);
  EXPECT_THROW(f.retune(41.0, 0.01), ConfigRejectedError);
}

TEST(LockDetection, PowerRatioCases) {
  std::vector<std::pair<double, double>> in_phase(100, {5.0, 0.0});
  EXPECT_TRUE(lock_detect(in_phase));
  std::vector<std::pair<double, double>> balanced(100, {3.0, 3.0});
  EXPECT_FALSE(lock_detect(balanced));
  std::vector<std::pair<double, double>> too_short(10, {5.0, 0.0});
  EXPECT_FALSE(lock_detect(too_short));
  // Sign of I does not matter.
  std::vector<std::pair<double, double>> bits;
  for (int k = 0; k < 100; ++k) bits.emplace_back(k % 3 ? 5.0 : -5.0, 0.1);
  EXPECT_TRUE(lock_detect(bits));
}

TEST_F(ChannelFixture, LockDetectorHoldsAt45DbHz) {
  const ChannelTruth tr = truth(45.0);
  const NcoState n = aligned(tr, 1.0);
  Rng rng(5);
  int failures = 0;
  const int windows = 2000;
  for (int w = 0; w < windows; ++w) {
    LockDetector det;
    for (int k = 0; k < 100; ++k) {
      const auto o = correlate(tr, n, 1.0, 1e-3, 0.5, &rng);
      det.push(o.ip, o.qp);
    }
    failures += det.locked() ? 0 : 1;
  }
  EXPECT_LE(failures, 1);
}

TEST_F(ChannelFixture, ZeroDiscriminatorsLeaveNcoUnchanged) {
  const LoopConfig cfg = preset_config(ScenarioTag::kStatic);
  NcoState n;
  n.carrier_freq = 1234.0;
  ChannelState st = init_channel(cfg, n, ChannelOptions{});
  CorrelatorOutput o;
  o.ip = 10.0;
  o.ie = o.il = 7.0;
  o.t_int = 1e-3;
  step_channel(st, cfg, o);
  EXPECT_NEAR(st.nco.carrier_freq, 1234.0, 1e-9);
  EXPECT_NEAR(st.nco.code_freq, kCaChipRate + 1234.0 / kCarrierToCodeRatio, 1e-9);
}

TEST_F(ChannelFixture, NarrowModeUsesNarrowBandwidths) {
  const LoopConfig cfg = preset_config(ScenarioTag::kRocket);
  ChannelState st = init_channel(cfg, NcoState{}, ChannelOptions{});
  EXPECT_DOUBLE_EQ(st.carrier.bandwidth(), 27.0);
  enter_narrow_mode(st, cfg);
  EXPECT_DOUBLE_EQ(st.carrier.bandwidth(), narrow_bandwidth(27.0, 50.0, 5.0));
  EXPECT_DOUBLE_EQ(st.code.bandwidth(), cfg.dll_narrow());
  EXPECT_DOUBLE_EQ(st.carrier.t_int(), cfg.t_int());
}

TEST_F(ChannelFixture, GuardViolationRejectsAtStart) {
  LoopConfig cfg = preset_config(ScenarioTag::kStatic);
  cfg.t_int_ms = 20;
  cfg.pll_bw = 60.0;
  cfg.pll_narrow_pct = 100.0;  // 60 Hz * 20 ms = 1.2
  EXPECT_THROW(init_channel(cfg, NcoState{}, ChannelOptions{}), ConfigRejectedError);
  ChannelOptions opt;
  opt.end_time = 5.0;
  const ChannelTrack track = run_channel(truth(), cfg, 1, opt);
  EXPECT_TRUE(track.rejected);
  EXPECT_FALSE(track.reject_reason.empty());
}

TEST_F(ChannelFixture, StaticPresetLocksAndTracksCode) {
  ChannelOptions opt;
  opt.end_time = 30.0;
  const ChannelTrack track = run_channel(truth(), preset_config(ScenarioTag::kStatic), 21, opt);
  ASSERT_FALSE(track.rejected);
  ASSERT_TRUE(track.first_lock_time.has_value());
  EXPECT_FALSE(track.loss_of_lock_time.has_value());
  ASSERT_TRUE(track.bit_sync_time.has_value());
  EXPECT_EQ(std::fmod(std::round(*track.bit_sync_time * 1e3), 20.0), 0.0);
  double sum = 0.0;
  int n = 0;
  for (const auto& e : track.epochs) {
    if (e.t < 5.0) continue;
    ASSERT_TRUE(e.locked) << e.t;
    sum += e.code_error * e.code_error;
    ++n;
  }
  ASSERT_GT(n, 0);
  EXPECT_LT(std::sqrt(sum / n), 0.05);
}

TEST_F(ChannelFixture, NoInitialErrorNeverLosesLock) {
  ChannelOptions opt;
  opt.end_time = 180.0;
  opt.init_code_error_chips = 0.0;
  opt.init_freq_error_hz = 0.0;
  const ChannelTrack track = run_channel(truth(), preset_config(ScenarioTag::kStatic), 3, opt, 100);
  EXPECT_FALSE(track.loss_of_lock_time.has_value());
  EXPECT_TRUE(track.epochs.back().narrow);
  EXPECT_NEAR(track.epochs.back().t, 180.0, 1.0);  // every 100th epoch is kept
}

TEST_F(ChannelFixture, RunsAreDeterministic) {
  ChannelOptions opt;
  opt.end_time = 4.0;
  const LoopConfig cfg = preset_config(ScenarioTag::kRocket);
  const ChannelTrack a = run_channel(truth(), cfg, 9, opt);
  const ChannelTrack b = run_channel(truth(), cfg, 9, opt);
  const ChannelTrack c = run_channel(truth(), cfg, 10, opt);
  ASSERT_EQ(a.epochs.size(), b.epochs.size());
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    ASSERT_EQ(a.epochs[i].code_error, b.epochs[i].code_error);
    ASSERT_EQ(a.epochs[i].carrier_freq, b.epochs[i].carrier_freq);
  }
  EXPECT_NE(a.epochs.back().code_error, c.epochs.back().code_error);
}

TEST(RocketChannel, RocketPresetHoldsLockThroughFlight) {
  const RocketParams p = default_rocket_params();
  auto g = std::make_shared<GroundTruth>(simulate_rocket(p, 70.0));
  const Constellation c = nominal_constellation();
  auto vis = visible_sats(g->states().front(), c, {}, 0.0);
  std::sort(vis.begin(), vis.end(), [](const auto& x, const auto& y) { return x.elevation_deg > y.elevation_deg; });
  const GpsSatellite sat = c[static_cast<std::size_t>(vis.front().prn - 1)];
  ChannelTruth tr(sat.prn, g, sat, 41.0, 4, 2.0);
  ChannelOptions opt;
  opt.end_time = g->end_time();
  const ChannelTrack track = run_channel(tr, preset_config(ScenarioTag::kRocket), 8, opt, 50);
  EXPECT_FALSE(track.loss_of_lock_time.has_value());
  ASSERT_TRUE(track.first_lock_time.has_value());
  EXPECT_LT(*track.first_lock_time, 1.0);
}

}  // namespace
}  // namespace gnsstune

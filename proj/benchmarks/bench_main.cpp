#include <algorithm>
#include <memory>

#include <benchmark/benchmark.h>

#include "gnsstune/constellation.hpp"
#include "gnsstune/navigation.hpp"
#include "gnsstune/signal.hpp"
#include "gnsstune/tracking.hpp"

namespace {

using namespace gnsstune;

const Geodetic kSite{37.10, -6.73, 20.0};

std::shared_ptr<const GroundTruth> site_truth(double duration) {
  return std::make_shared<GroundTruth>(static_truth(kSite, duration, 20.0));
}

void BM_Correlate(benchmark::State& state) {
  const auto g = site_truth(10.0);
  const auto sats = nominal_constellation();
  const ChannelTruth truth(sats.front().prn, g, sats.front(), 41.0, 1, 1.0);
  NcoState nco;
  Rng rng(1);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(correlate(truth, nco, t, 0.001, 0.5, &rng));
    t = t > 9.0 ? 0.0 : t + 0.001;
  }
}
BENCHMARK(BM_Correlate);

// One channel over 10 s of a static run, 1 ms integrations.
void BM_ChannelTenSeconds(benchmark::State& state) {
  const auto g = site_truth(10.0);
  const EcefState rx = g->at(0.0);
  const Constellation sats = nominal_constellation();
  const int prn = visible_sats(rx, sats, {VisibilityRule::kElevationMask, 10.0}, 0.0).front().prn;
  const GpsSatellite sat = *std::find_if(sats.begin(), sats.end(), [&](const GpsSatellite& s) { return s.prn == prn; });
  const ChannelTruth truth(sat.prn, g, sat, 41.0, 2, 1.0);
  const LoopConfig cfg = preset_config(ScenarioTag::kRocket);
  ChannelOptions opt;
  opt.end_time = 10.0;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_channel(truth, cfg, ++seed, opt, EpochObserver{}));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_ChannelTenSeconds)->Unit(benchmark::kMillisecond);

void BM_SolvePvt(benchmark::State& state) {
  EcefState rx;
  rx.position = geodetic_to_ecef(kSite);
  std::vector<ChannelSnapshot> ch;
  for (const auto& v : visible_sats(rx, nominal_constellation(), {VisibilityRule::kElevationMask, 10.0}, 0.0)) {
    ch.push_back({v.prn, 0.01, 0.5, true});
  }
  const auto m = form_measurements(ch, rx, nominal_constellation(), 0.0, {30.0, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(solve_pvt(m, std::nullopt));
}
BENCHMARK(BM_SolvePvt);

}  // namespace

BENCHMARK_MAIN();

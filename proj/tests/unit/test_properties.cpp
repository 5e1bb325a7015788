// Randomized invariant checks. Each property draws its cases from a fixed
// seed so failures reproduce; the failing case index is printed.
#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "gnsstune/constellation.hpp"
#include "gnsstune/cost.hpp"
#include "gnsstune/geodesy.hpp"
#include "gnsstune/navigation.hpp"
#include "gnsstune/optimizer.hpp"
#include "gnsstune/signal.hpp"

namespace gnsstune {
namespace {

constexpr int kCases = 200;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Geodetic any_geodetic(Rng& rng) {
  return {uniform(rng, -89.9, 89.9), uniform(rng, -180.0, 180.0), uniform(rng, -400.0, 2.5e6)};
}

Chromosome any_chromosome(Rng& rng, std::size_t n) {
  Chromosome c(n);
  for (auto& b : c) b = static_cast<std::uint8_t>(rng() & 1U);
  return c;
}

ParameterSpace any_space(Rng& rng) {
  static const ScenarioTag tags[] = {ScenarioTag::kStatic, ScenarioTag::kRocket, ScenarioTag::kLeo};
  return ParameterSpace(tags[rng() % 3], rng() % 2 ? Resolution::kCoarse : Resolution::kFine);
}

// A short moving truth with random position / velocity errors of the given scales.
struct NavCase {
  std::shared_ptr<GroundTruth> truth;
  std::vector<PvtSolution> nav;
};

NavCase any_nav(Rng& rng, double pos_scale, double vel_scale) {
  const std::size_t n = 50 + rng() % 100;
  std::vector<EcefState> s(n);
  const Vec3 v0(uniform(rng, -300, 300), uniform(rng, -300, 300), uniform(rng, -300, 300));
  for (std::size_t k = 0; k < n; ++k) {
    s[k].t = static_cast<double>(k) / 20.0;
    s[k].velocity = v0;
    s[k].position = Vec3(6.37e6, 0, 0) + v0 * s[k].t;
  }
  NavCase c;
  c.truth = std::make_shared<GroundTruth>(20.0, s, ScenarioTag::kRocket);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const auto& st : s) {
    PvtSolution p;
    p.t = st.t;
    p.valid = (rng() % 10) != 0;
    p.position = st.position + pos_scale * Vec3(g(rng), g(rng), g(rng));
    p.velocity = st.velocity + vel_scale * Vec3(g(rng), g(rng), g(rng));
    c.nav.push_back(p);
  }
  return c;
}

TEST(Property, GeodeticRoundTrip) {
  Rng rng(101);
  for (int i = 0; i < kCases; ++i) {
    const Geodetic g = any_geodetic(rng);
    const Geodetic back = ecef_to_geodetic(geodetic_to_ecef(g));
    ASSERT_NEAR(back.lat_deg, g.lat_deg, 1e-9) << i;
    ASSERT_NEAR(back.lon_deg, g.lon_deg, 1e-9) << i;
    ASSERT_NEAR(back.height_m, g.height_m, 1e-4) << i;
  }
}

TEST(Property, CostScalesQuadraticallyWithErrors) {
  Rng rng(102);
  const auto b = compute_bounds(ScenarioTag::kRocket);
  for (int i = 0; i < 50; ++i) {
    NavCase c = any_nav(rng, uniform(rng, 0.1, 20.0), uniform(rng, 0.01, 2.0));
    for (auto& p : c.nav) p.valid = true;
    const double jp = position_cost(*c.truth, c.nav, b).value;
    const double jv = velocity_cost(*c.truth, c.nav, b).value;
    for (std::size_t k = 0; k < c.nav.size(); ++k) {
      const EcefState tr = c.truth->at(c.nav[k].t);
      c.nav[k].position = tr.position + 2.0 * (c.nav[k].position - tr.position);
      c.nav[k].velocity = tr.velocity + 2.0 * (c.nav[k].velocity - tr.velocity);
    }
    ASSERT_NEAR(position_cost(*c.truth, c.nav, b).value / jp, 4.0, 1e-6) << i;
    ASSERT_NEAR(velocity_cost(*c.truth, c.nav, b).value / jv, 4.0, 1e-6) << i;
  }
}

TEST(Property, CostMonotoneInComponents) {
  Rng rng(103);
  for (auto tag : {ScenarioTag::kStatic, ScenarioTag::kRocket, ScenarioTag::kLeo}) {
    const auto b = compute_bounds(tag);
    for (int i = 0; i < kCases; ++i) {
      const double jp = uniform(rng, 0.0, 3 * b.j_pos_max);
      const double jv = uniform(rng, 0.0, 3 * b.j_vel_max);
      const double dp = uniform(rng, 0.0, b.j_pos_max);
      const double dv = uniform(rng, 0.0, b.j_vel_max);
      const double j = total_cost(jp, jv, b).j_total;
      ASSERT_GE(j, 0.0);
      ASSERT_GE(total_cost(jp + dp, jv, b).j_total, j) << i;
      ASSERT_GE(total_cost(jp, jv + dv, b).j_total, j) << i;
    }
  }
}

TEST(Property, RankingInvariantUnderCommonBoundScaling) {
  // Scaling both widths by one factor (with minima shifted consistently)
  // rescales every cost by the same factor, so orderings are preserved.
  Rng rng(104);
  const auto b = compute_bounds(ScenarioTag::kLeo);
  for (int i = 0; i < kCases; ++i) {
    const double s = uniform(rng, 0.2, 5.0);
    NormalizationBounds w = b;
    w.j_pos_max = b.j_pos_min + s * (b.j_pos_max - b.j_pos_min);
    w.j_vel_max = b.j_vel_min + s * (b.j_vel_max - b.j_vel_min);
    const double p1 = uniform(rng, b.j_pos_min, 2 * b.j_pos_max), v1 = uniform(rng, b.j_vel_min, 2 * b.j_vel_max);
    const double p2 = uniform(rng, b.j_pos_min, 2 * b.j_pos_max), v2 = uniform(rng, b.j_vel_min, 2 * b.j_vel_max);
    const bool before = total_cost(p1, v1, b).j_total < total_cost(p2, v2, b).j_total;
    const bool after = total_cost(p1, v1, w).j_total < total_cost(p2, v2, w).j_total;
    ASSERT_EQ(before, after) << i;
  }
}

TEST(Property, CommonRangeBiasOnlyMovesTheClock) {
  Rng rng(105);
  const auto sats = nominal_constellation();
  for (int i = 0; i < 60; ++i) {
    EcefState rx;
    rx.position = geodetic_to_ecef({uniform(rng, -60, 60), uniform(rng, -180, 180), uniform(rng, 0, 3000)});
    rx.velocity = Vec3(uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -5, 5));
    const double t = uniform(rng, 0, 86400);
    std::vector<ChannelSnapshot> ch;
    for (const auto& v : visible_sats(rx, sats, {VisibilityRule::kElevationMask, 10.0}, t)) {
      ch.push_back({v.prn, 0.0, 0.0, true});
    }
    if (ch.size() < 5) continue;
    const double bias = uniform(rng, -1e5, 1e5), drift = uniform(rng, -50, 50);
    const ClockModel clock{bias, drift};
    const auto m = form_measurements(ch, rx, sats, t, clock);
    const PvtSolution s = solve_pvt(m, std::nullopt, t);
    ASSERT_TRUE(s.valid) << i;
    ASSERT_LT((s.position - rx.position).norm(), 1e-3) << i;
    ASSERT_LT((s.velocity - rx.velocity).norm(), 1e-5) << i;
    ASSERT_NEAR(s.clock_bias, clock.bias(t), 1e-3) << i;
    ASSERT_NEAR(s.clock_drift, drift, 1e-5) << i;
  }
}

TEST(Property, CrossoverKeepsEachLocusFromAParent) {
  Rng rng(106);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t n = 2 + rng() % 60;
    const Chromosome a = any_chromosome(rng, n), b = any_chromosome(rng, n);
    const auto [c, d] = crossover(a, b, rng);
    ASSERT_EQ(c.size(), n);
    ASSERT_EQ(d.size(), n);
    for (std::size_t k = 0; k < n; ++k) {
      ASSERT_TRUE((c[k] == a[k] && d[k] == b[k]) || (c[k] == b[k] && d[k] == a[k])) << i;
    }
  }
}

TEST(Property, DecodeEncodeIsIdempotent) {
  Rng rng(107);
  for (int i = 0; i < kCases; ++i) {
    const ParameterSpace s = any_space(rng);
    const Chromosome c = any_chromosome(rng, static_cast<std::size_t>(s.length()));
    const LoopConfig cfg = decode(c, s);
    const Chromosome canonical = encode(cfg, s);
    ASSERT_EQ(decode(canonical, s), cfg) << i;
    ASSERT_EQ(encode(decode(canonical, s), s), canonical) << i;
    ASSERT_EQ(level_indices(c, s), level_indices(canonical, s)) << i;
  }
}

TEST(Property, MutationPreservesLengthAndChangesSomething) {
  Rng rng(108);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t n = 1 + rng() % 60;
    const Chromosome c = any_chromosome(rng, n);
    const Chromosome m = mutate(c, uniform(rng, 0.0, 0.2), rng);
    ASSERT_EQ(m.size(), n);
    ASSERT_NE(m, c) << i;
  }
}

TEST(Property, CorrelatorIsAFunctionOfItsSeed) {
  Rng rng(109);
  auto g = std::make_shared<GroundTruth>(static_truth({37.1, -6.73, 20.0}, 30.0, 20.0));
  const auto sats = nominal_constellation();
  for (int i = 0; i < 50; ++i) {
    const GpsSatellite& sat = sats[rng() % sats.size()];
    const ChannelTruth truth(sat.prn, g, sat, uniform(rng, 30, 50), rng(), 1.0);
    NcoState nco;
    nco.code_phase = uniform(rng, 0, 1023);
    nco.carrier_freq = uniform(rng, -5000, 5000);
    const double t = uniform(rng, 0, 29);
    const std::uint64_t seed = rng();
    Rng r1(seed), r2(seed);
    const auto a = correlate(truth, nco, t, 0.001, 0.5, &r1);
    const auto b = correlate(truth, nco, t, 0.001, 0.5, &r2);
    ASSERT_EQ(a.ie, b.ie);
    ASSERT_EQ(a.ip, b.ip);
    ASSERT_EQ(a.ql, b.ql);
  }
}

}  // namespace
}  // namespace gnsstune

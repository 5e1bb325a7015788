#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "gnsstune/error.hpp"
#include "gnsstune/optimizer.hpp"

namespace gnsstune {
namespace {

TEST(ParameterSpace, ChromosomeLengths) {
  EXPECT_EQ(ParameterSpace(ScenarioTag::kStatic, Resolution::kCoarse).length(), 30);
  EXPECT_EQ(ParameterSpace(ScenarioTag::kRocket, Resolution::kCoarse).length(), 27);
  EXPECT_EQ(ParameterSpace(ScenarioTag::kLeo, Resolution::kCoarse).length(), 27);
  EXPECT_EQ(ParameterSpace(ScenarioTag::kStatic, Resolution::kFine).length(), 39);
  EXPECT_EQ(ParameterSpace(ScenarioTag::kRocket, Resolution::kFine).length(), 36);
  EXPECT_EQ(ParameterSpace(ScenarioTag::kLeo, Resolution::kFine).length(), 36);
}

TEST(ParameterSpace, FineBitBudget) {
  // ceil(log2(levels)) per parameter: 7 + 7 + 1 + 6 + 7 + 2 + 6.
  const ParameterSpace s(ScenarioTag::kRocket, Resolution::kFine);
  std::map<std::string, int> bits;
  for (const auto& p : s.params()) {
    bits[p.name] = p.bits;
    EXPECT_EQ(p.bits, static_cast<int>(std::ceil(std::log2(static_cast<double>(p.levels.size())))));
  }
  EXPECT_EQ(bits["pll_bw"], 7);
  EXPECT_EQ(bits["pll_narrow_pct"], 7);
  EXPECT_EQ(bits["pll_order"], 1);
  EXPECT_EQ(bits["dll_bw"], 6);
  EXPECT_EQ(bits["dll_narrow_pct"], 7);
  EXPECT_EQ(bits["dll_order"], 2);
  EXPECT_EQ(bits["fll_bw"], 6);
  EXPECT_EQ(bits.count("t_int"), 0u);
}

TEST(Coding, AllZeroIsRangeMinimum) {
  const ParameterSpace s(ScenarioTag::kStatic, Resolution::kCoarse);
  const LoopConfig c = decode(Chromosome(static_cast<std::size_t>(s.length()), 0), s);
  EXPECT_EQ(c.t_int_ms, 1);
  EXPECT_EQ(c.pll_bw, 5.0);
  EXPECT_EQ(c.pll_narrow_pct, 0.0);
  EXPECT_EQ(c.pll_order, 2);
  EXPECT_EQ(c.dll_bw, 1.0);
  EXPECT_EQ(c.dll_narrow_pct, 0.0);
  EXPECT_EQ(c.dll_order, 1);
  EXPECT_EQ(c.fll_bw, 1.0);
}

TEST(Coding, AllOnesClampsToLastLevel) {
  const ParameterSpace s(ScenarioTag::kRocket, Resolution::kCoarse);
  const LoopConfig c = decode(Chromosome(static_cast<std::size_t>(s.length()), 1), s);
  EXPECT_EQ(c.pll_bw, 80.0);
  EXPECT_EQ(c.pll_narrow_pct, 100.0);
  EXPECT_EQ(c.dll_order, 3);
  EXPECT_EQ(c.dll_bw, 49.0);
  EXPECT_EQ(c.t_int_ms, 1);
}

TEST(Coding, RoundTripAndNearestLevel) {
  const ParameterSpace fine(ScenarioTag::kStatic, Resolution::kFine);
  const LoopConfig cfg{8, 27.0, 50.0, 3, 12.0, 33.0, 2, 15.0};
  EXPECT_EQ(decode(encode(cfg, fine), fine), cfg);
  const ParameterSpace coarse(ScenarioTag::kStatic, Resolution::kCoarse);
  const LoopConfig snapped = decode(encode(cfg, coarse), coarse);
  EXPECT_EQ(snapped.pll_bw, 25.0);
  EXPECT_EQ(snapped.dll_bw, 13.0);
  EXPECT_EQ(snapped.dll_narrow_pct, 35.0);
  EXPECT_EQ(snapped.fll_bw, 16.0);
  LoopConfig bad = cfg;
  bad.pll_bw = 100.0;
  EXPECT_THROW(encode(bad, fine), ConfigError);
  EXPECT_THROW(decode(Chromosome(5, 0), fine), std::invalid_argument);
}

TEST(Coding, PlainBinaryMsbFirst) {
  const ParameterSpace s(ScenarioTag::kLeo, Resolution::kCoarse);
  std::vector<int> idx(s.params().size(), 0);
  idx[0] = 5;  // pll_bw, 4 bits -> 0101
  const Chromosome c = from_indices(idx, s);
  EXPECT_EQ(to_bits(c).substr(0, 4), "0101");
  EXPECT_EQ(level_indices(c, s), idx);
  EXPECT_EQ(to_hex(Chromosome{1, 0, 1, 1, 1}), "17");
}

TEST(Lhs, UnitSamplesOnePerStratum) {
  Rng rng(3);
  const int n = 100, dims = 8;
  const auto u = lhs_unit_samples(n, dims, rng);
  ASSERT_EQ(u.size(), static_cast<std::size_t>(n));
  for (int d = 0; d < dims; ++d) {
    std::vector<int> count(n, 0), decile(10, 0);
    for (const auto& row : u) {
      ++count[static_cast<std::size_t>(std::floor(row[static_cast<std::size_t>(d)] * n))];
      ++decile[static_cast<std::size_t>(std::floor(row[static_cast<std::size_t>(d)] * 10))];
    }
    for (int c : count) ASSERT_EQ(c, 1);
    for (int c : decile) ASSERT_EQ(c, 10);
  }
}

TEST(Lhs, LevelIndicesArePermutationWhenPopulationMatchesLevels) {
  const ParameterSpace s(ScenarioTag::kRocket, Resolution::kFine);
  const int levels = static_cast<int>(s.params()[0].levels.size());  // pll_bw, 76
  Rng rng(11);
  const auto pop = lhs_init(s, levels, rng);
  std::vector<int> seen(static_cast<std::size_t>(levels), 0);
  for (const auto& ind : pop) ++seen[static_cast<std::size_t>(level_indices(ind.chromosome, s)[0])];
  for (int c : seen) EXPECT_EQ(c, 1);
  for (const auto& ind : pop) EXPECT_EQ(ind.origin, Origin::kRandom);
}

TEST(Lhs, DeterministicAndFewDuplicates) {
  const ParameterSpace s(ScenarioTag::kRocket, Resolution::kCoarse);
  Rng a(1), b(1);
  const auto p = lhs_init(s, 100, a);
  const auto q = lhs_init(s, 100, b);
  for (std::size_t i = 0; i < p.size(); ++i) ASSERT_EQ(p[i].chromosome, q[i].chromosome);

  int dup = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r(seed);
    std::set<std::string> keys;
    for (const auto& ind : lhs_init(s, 100, r)) dup += keys.insert(config_key(ind.config)).second ? 0 : 1;
  }
  EXPECT_LT(dup / 2000.0, 0.05);
}

std::vector<Individual> ranked(int n) {
  std::vector<Individual> pop(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    CostComponents c;
    c.j_total = i;
    pop[static_cast<std::size_t>(i)].cost = c;
  }
  return pop;
}

TEST(Tournament, BestWinsSevenPercentOfDraws) {
  // P(rank 1 among 7 distinct draws from 100) = 1 - C(99,7)/C(100,7) = 7/100.
  const auto pop = ranked(100);
  Rng rng(17);
  const int draws = 10000;
  int best = 0;
  for (int i = 0; i < draws; ++i) best += tournament_select(pop, 7, 1.0, rng) == 0;
  EXPECT_NEAR(best / double(draws), 0.07, 0.01);
}

TEST(Tournament, ExtremeSizes) {
  const auto pop = ranked(10);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) ASSERT_EQ(tournament_select(pop, 10, 1.0, rng), 0u);
  std::vector<int> hist(10, 0);
  for (int i = 0; i < 10000; ++i) ++hist[tournament_select(pop, 1, 1.0, rng)];
  for (int h : hist) EXPECT_NEAR(h, 1000, 150);
  EXPECT_THROW(tournament_select(pop, 11, 1.0, rng), std::invalid_argument);
}

TEST(Crossover, ClosureAndCutRange) {
  Rng rng(8);
  const Chromosome a(36, 0), b(36, 1);
  for (int i = 0; i < 200; ++i) {
    auto [c, d] = crossover(a, b, rng);
    ASSERT_EQ(c.size(), 36u);
    EXPECT_EQ(c.front(), 0);  // cut >= 1
    EXPECT_EQ(c.back(), 1);   // cut <= L-1
    for (std::size_t k = 0; k < 36; ++k) ASSERT_NE(c[k], d[k]);
    for (std::size_t k = 1; k < 36; ++k) ASSERT_LE(c[k - 1], c[k]);  // one segment switch
  }
  const Chromosome x = {1, 0, 0, 1, 1, 0};
  auto [p, q] = crossover(x, x, rng);
  EXPECT_EQ(p, x);
  EXPECT_EQ(q, x);
}

TEST(Mutation, ForcedFlipAndExpectedRate) {
  Rng rng(4);
  const Chromosome c(36, 0);
  const Chromosome forced = mutate(c, 0.0, rng);
  EXPECT_EQ(std::count(forced.begin(), forced.end(), 1), 1);
  double flips = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Chromosome m = mutate(c, 0.06, rng);
    ASSERT_EQ(m.size(), c.size());
    const auto f = std::count(m.begin(), m.end(), 1);
    ASSERT_GE(f, 1);
    flips += static_cast<double>(f);
  }
  // 36 * 0.06 = 2.16, plus the forced flip when none happened (0.94^36 = 0.108).
  EXPECT_NEAR(flips / n, 2.16 + std::pow(0.94, 36), 0.05);
}

TEST(Evolve, ElitesCarriedAndNoReplication) {
  const ParameterSpace s(ScenarioTag::kLeo, Resolution::kCoarse);
  Rng rng(21);
  auto pop = lhs_init(s, 30, rng);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CostComponents c;
    c.j_total = std::abs(15.0 - static_cast<double>(i));
    pop[i].cost = c;
  }
  GaConfig ga;
  ga.pop_size = 30;
  ga.n_elite = 2;
  const auto next = evolve(pop, ga, s, {}, 2, rng);
  ASSERT_EQ(next.size(), 30u);
  EXPECT_EQ(next[0].chromosome, pop[15].chromosome);
  EXPECT_EQ(next[0].origin, Origin::kElitism);
  EXPECT_TRUE(next[0].cost.has_value());
  EXPECT_EQ(next[1].origin, Origin::kElitism);
  for (std::size_t i = 2; i < next.size(); ++i) {
    EXPECT_NE(next[i].origin, Origin::kReplication);
    EXPECT_NE(next[i].origin, Origin::kElitism);
    EXPECT_FALSE(next[i].cost.has_value());
    EXPECT_EQ(next[i].generation, 2);
  }
}

TEST(GaConfigCheck, RejectsInconsistentSettings) {
  GaConfig ga;
  EXPECT_NO_THROW(validate(ga));
  ga.p_mutation = 0.6;
  EXPECT_THROW(validate(ga), ConfigError);
  ga = GaConfig{};
  ga.tournament_size = 200;
  EXPECT_THROW(validate(ga), ConfigError);
  ga = GaConfig{};
  ga.n_elite = 100;
  EXPECT_THROW(validate(ga), ConfigError);
}

CostComponents cost_of(double j) {
  CostComponents c;
  c.j_total = j;
  return c;
}

TEST(RunGa, ConstantEvaluatorStopsAtGenerationFour) {
  GaConfig ga;
  ga.pop_size = 20;
  const auto res = run_ga(ScenarioTag::kRocket, ga, [](const LoopConfig&, std::uint64_t) { return cost_of(1.0); }, 5,
                          cost_of(10.0));
  EXPECT_EQ(res.termination, Termination::kStagnation);
  EXPECT_EQ(res.generations.size(), 4u);
}

TEST(RunGa, CachesAndCountsEvaluations) {
  std::atomic<int> calls{0};
  auto eval = [&](const LoopConfig& c, std::uint64_t seed) {
    ++calls;
    return cost_of(std::abs(c.pll_bw - 30.0) + std::abs(c.fll_bw - 10.0) + (seed % 7) * 1e-3);
  };
  GaConfig ga;
  ga.stagnation_limit = 100;  // run all ten generations
  const auto res = run_ga(ScenarioTag::kLeo, ga, eval, 42, cost_of(1e3));
  EXPECT_EQ(res.generations.size(), 10u);
  EXPECT_EQ(res.termination, Termination::kCompleted);
  EXPECT_EQ(static_cast<std::size_t>(calls.load()), res.unique_evaluations);
  EXPECT_GE(res.unique_evaluations, 950u);
  EXPECT_LE(res.unique_evaluations, 1000u);
  for (std::size_t g = 1; g < res.generations.size(); ++g) {
    EXPECT_LE(res.generations[g].best.j(), res.generations[g - 1].best.j());
  }
  EXPECT_EQ(res.generations[4].resolution, Resolution::kCoarse);
  EXPECT_EQ(res.generations[5].resolution, Resolution::kFine);
  EXPECT_EQ(res.generations[5].population.front().chromosome.size(), 36u);
}

TEST(RunGa, EvaluatorFailureChargesFailureCost) {
  GaConfig ga;
  ga.pop_size = 10;
  ga.max_generations = 2;
  auto eval = [](const LoopConfig& c, std::uint64_t) -> CostComponents {
    if (c.pll_order == 3) throw std::runtime_error("boom");
    return cost_of(1.0);
  };
  const auto res = run_ga(ScenarioTag::kRocket, ga, eval, 2, cost_of(99.0));
  for (const auto& ind : res.generations.front().population) {
    EXPECT_EQ(ind.j(), ind.config.pll_order == 3 ? 99.0 : 1.0);
  }
}

TEST(RunGa, IndependentOfParallelism) {
  auto eval = [](const LoopConfig& c, std::uint64_t seed) {
    return cost_of(std::pow(c.pll_bw - 22.0, 2) + std::pow(c.dll_bw - 7.0, 2) + (seed % 1000) * 1e-4);
  };
  GaConfig ga;
  ga.pop_size = 24;
  ga.max_generations = 6;
  const auto a = run_ga(ScenarioTag::kStatic, ga, eval, 99, cost_of(1e9));
  ga.parallel = 4;
  const auto b = run_ga(ScenarioTag::kStatic, ga, eval, 99, cost_of(1e9));
  ASSERT_EQ(a.generations.size(), b.generations.size());
  for (std::size_t g = 0; g < a.generations.size(); ++g) {
    const auto& pa = a.generations[g].population;
    const auto& pb = b.generations[g].population;
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      ASSERT_EQ(pa[i].chromosome, pb[i].chromosome);
      ASSERT_EQ(pa[i].seed, pb[i].seed);
      ASSERT_EQ(pa[i].j(), pb[i].j());
    }
  }
  EXPECT_EQ(a.best.config, b.best.config);
}

}  // namespace
}  // namespace gnsstune

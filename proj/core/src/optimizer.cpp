#include "gnsstune/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include "gnsstune/error.hpp"
#include "gnsstune/parallel.hpp"

namespace gnsstune {

namespace {

std::vector<double> arithmetic_levels(double lo, double hi, double step) {
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = lo + k * step;
    if (v > hi + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

int bits_for(std::size_t levels) {
  int b = 0;
  while ((std::size_t{1} << b) < levels) ++b;
  return b;
}

double get_field(const LoopConfig& c, const std::string& name) {
  if (name == "t_int") return c.t_int_ms;
  if (name == "pll_bw") return c.pll_bw;
  if (name == "pll_narrow_pct") return c.pll_narrow_pct;
  if (name == "pll_order") return c.pll_order;
  if (name == "dll_bw") return c.dll_bw;
  if (name == "dll_narrow_pct") return c.dll_narrow_pct;
  if (name == "dll_order") return c.dll_order;
  if (name == "fll_bw") return c.fll_bw;
  throw std::logic_error("unknown parameter " + name);
}

void set_field(LoopConfig& c, const std::string& name, double v) {
  if (name == "t_int") c.t_int_ms = static_cast<int>(std::lround(v));
  else if (name == "pll_bw") c.pll_bw = v;
  else if (name == "pll_narrow_pct") c.pll_narrow_pct = v;
  else if (name == "pll_order") c.pll_order = static_cast<int>(std::lround(v));
  else if (name == "dll_bw") c.dll_bw = v;
  else if (name == "dll_narrow_pct") c.dll_narrow_pct = v;
  else if (name == "dll_order") c.dll_order = static_cast<int>(std::lround(v));
  else if (name == "fll_bw") c.fll_bw = v;
  else throw std::logic_error("unknown parameter " + name);
}

int nearest_level(const std::vector<double>& levels, double v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(levels.size()); ++i) {
    if (std::abs(levels[i] - v) < std::abs(levels[best] - v) - 1e-12) best = i;
  }
  return best;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t uniform_index(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

std::string_view to_string(Resolution r) { return r == Resolution::kCoarse ? "coarse" : "fine"; }

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::kRandom: return "random";
    case Origin::kElitism: return "elitism";
    case Origin::kReplication: return "replication";
    case Origin::kCrossover: return "crossover";
    case Origin::kMutation: return "mutation";
  }
  return "?";
}

std::string_view to_string(Termination t) {
  return t == Termination::kCompleted ? "completed" : "stagnation";
}

ParameterSpace::ParameterSpace(ScenarioTag tag, Resolution resolution) : tag_(tag), resolution_(resolution) {
  const bool coarse = resolution == Resolution::kCoarse;
  auto add = [&](std::string name, std::vector<double> levels, bool categorical) {
    ParamSpec p{std::move(name), std::move(levels), 0, categorical};
    p.bits = bits_for(p.levels.size());
    length_ += p.bits;
    params_.push_back(std::move(p));
  };
  // Integration time keeps the same eight levels in both phases.
  if (t_int_active()) add("t_int", {1, 2, 4, 5, 8, 10, 15, 20}, false);
  add("pll_bw", arithmetic_levels(5, 80, coarse ? 5 : 1), false);
  add("pll_narrow_pct", arithmetic_levels(0, 100, coarse ? 5 : 1), false);
  add("pll_order", {2, 3}, true);
  add("dll_bw", arithmetic_levels(1, 50, coarse ? 3 : 1), false);
  add("dll_narrow_pct", arithmetic_levels(0, 100, coarse ? 5 : 1), false);
  add("dll_order", {1, 2, 3}, true);
  add("fll_bw", arithmetic_levels(1, 50, coarse ? 3 : 1), false);
}

std::vector<int> level_indices(const Chromosome& chromosome, const ParameterSpace& space) {
  if (static_cast<int>(chromosome.size()) != space.length()) {
    throw std::invalid_argument("chromosome length " + std::to_string(chromosome.size()) + " does not match space length " +
                                std::to_string(space.length()));
  }
  std::vector<int> out;
  std::size_t pos = 0;
  for (const ParamSpec& p : space.params()) {
    std::size_t code = 0;
    for (int b = 0; b < p.bits; ++b) code = (code << 1) | (chromosome[pos++] & 1U);
    out.push_back(static_cast<int>(std::min(code, p.levels.size() - 1)));
  }
  return out;
}

Chromosome from_indices(const std::vector<int>& indices, const ParameterSpace& space) {
  const auto& params = space.params();
  if (indices.size() != params.size()) throw std::invalid_argument("index count does not match parameter count");
  Chromosome c;
  c.reserve(space.length());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const int idx = indices[i];
    if (idx < 0 || idx >= static_cast<int>(params[i].levels.size())) {
      throw std::invalid_argument("level index out of range for " + params[i].name);
    }
    for (int b = params[i].bits - 1; b >= 0; --b) c.push_back(static_cast<std::uint8_t>((idx >> b) & 1));
  }
  return c;
}

Chromosome encode(const LoopConfig& cfg, const ParameterSpace& space) {
  LoopConfig checked = cfg;
  if (!space.t_int_active()) checked.t_int_ms = 1;
  validate(checked);
  std::vector<int> idx;
  for (const ParamSpec& p : space.params()) idx.push_back(nearest_level(p.levels, get_field(checked, p.name)));
  return from_indices(idx, space);
}

LoopConfig decode(const Chromosome& chromosome, const ParameterSpace& space) {
  const auto idx = level_indices(chromosome, space);
  LoopConfig cfg;
  cfg.t_int_ms = 1;
  const auto& params = space.params();
  for (std::size_t i = 0; i < params.size(); ++i) set_field(cfg, params[i].name, params[i].levels[idx[i]]);
  return cfg;
}

std::string to_hex(const Chromosome& c) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  // Left-pad to whole nibbles so the value reads as the MSB-first integer.
  const std::size_t pad = (4 - c.size() % 4) % 4;
  unsigned nibble = 0;
  std::size_t count = pad;
  for (std::uint8_t bit : c) {
    nibble = (nibble << 1) | (bit & 1U);
    if (++count % 4 == 0) {
      out.push_back(kDigits[nibble]);
      nibble = 0;
    }
  }
  return out;
}

std::string to_bits(const Chromosome& c) {
  std::string out;
  out.reserve(c.size());
  for (std::uint8_t bit : c) out.push_back(bit ? '1' : '0');
  return out;
}

std::string config_key(const LoopConfig& cfg) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d|%.6g|%.6g|%d|%.6g|%.6g|%d|%.6g", cfg.t_int_ms, cfg.pll_bw, cfg.pll_narrow_pct,
                cfg.pll_order, cfg.dll_bw, cfg.dll_narrow_pct, cfg.dll_order, cfg.fll_bw);
  return buf;
}

void validate(const GaConfig& ga) {
  auto fail = [](const std::string& what) { throw ConfigError("ga config: " + what); };
  if (ga.pop_size < 2) fail("pop_size must be at least 2");
  if (ga.max_generations < 1) fail("max_generations must be at least 1");
  for (double p : {ga.p_replication, ga.p_crossover, ga.p_mutation, ga.tournament_p, ga.mutation_rate}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
  }
  if (std::abs(ga.p_replication + ga.p_crossover + ga.p_mutation - 1.0) > 1e-9) {
    fail("operator probabilities must sum to 1");
  }
  if (ga.n_elite < 0 || ga.n_elite >= ga.pop_size) fail("n_elite must be in [0, pop_size)");
  if (ga.tournament_size < 1 || ga.tournament_size > ga.pop_size) fail("tournament_size must be in [1, pop_size]");
  if (ga.stagnation_limit < 1) fail("stagnation_limit must be at least 1");
  if (ga.coarse_generations < 0) fail("coarse_generations must be non-negative");
  if (ga.duplicate_retries < 0) fail("duplicate_retries must be non-negative");
  if (ga.parallel < 1) fail("parallel must be at least 1");
}

std::vector<std::vector<double>> lhs_unit_samples(int n, int dims, Rng& rng) {
  std::vector<std::vector<double>> out(n, std::vector<double>(dims));
  std::vector<int> perm(n);
  for (int d = 0; d < dims; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) {
      const double u = (perm[i] + uniform01(rng)) / n;
      out[i][d] = std::min(u, std::nextafter(1.0, 0.0));
    }
  }
  return out;
}

std::vector<Individual> lhs_init(const ParameterSpace& space, int n, Rng& rng) {
  const auto& params = space.params();
  int dims = 0;
  for (const auto& p : params) dims += p.categorical ? 0 : 1;
  const auto u = lhs_unit_samples(n, dims, rng);
  std::vector<Individual> pop;
  pop.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> idx;
    int d = 0;
    for (const auto& p : params) {
      const int levels = static_cast<int>(p.levels.size());
      if (p.categorical) {
        idx.push_back(static_cast<int>(uniform_index(levels, rng)));
      } else {
        idx.push_back(std::min(levels - 1, static_cast<int>(u[i][d++] * levels)));
      }
    }
    Individual ind;
    ind.chromosome = from_indices(idx, space);
    ind.config = decode(ind.chromosome, space);
    ind.origin = Origin::kRandom;
    ind.generation = 1;
    pop.push_back(std::move(ind));
  }
  return pop;
}

std::size_t tournament_select(const std::vector<Individual>& population, int k, double p, Rng& rng) {
  if (k < 1 || static_cast<std::size_t>(k) > population.size()) {
    throw std::invalid_argument("tournament size must be in [1, population size]");
  }
  std::vector<std::size_t> idx(population.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(idx.size() - i, rng);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  const double u = uniform01(rng);
  if (u < p) {
    return *std::min_element(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double ja = population[a].j(), jb = population[b].j();
      return ja < jb || (ja == jb && a < b);
    });
  }
  return idx[uniform_index(idx.size(), rng)];
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, Rng& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover parents differ in length");
  if (a.size() < 2) return {a, b};
  const std::size_t cut = 1 + uniform_index(a.size() - 1, rng);
  Chromosome c1(a.begin(), a.begin() + cut), c2(b.begin(), b.begin() + cut);
  c1.insert(c1.end(), b.begin() + cut, b.end());
  c2.insert(c2.end(), a.begin() + cut, a.end());
  return {std::move(c1), std::move(c2)};
}

Chromosome mutate(const Chromosome& c, double rate, Rng& rng) {
  Chromosome out = c;
  bool flipped = false;
  for (auto& bit : out) {
    if (uniform01(rng) < rate) {
      bit ^= 1U;
      flipped = true;
    }
  }
  if (!flipped && !out.empty()) out[uniform_index(out.size(), rng)] ^= 1U;
  return out;
}

std::vector<Individual> evolve(const std::vector<Individual>& population, const GaConfig& ga,
                               const ParameterSpace& space, const EvalCache& cache, int generation, Rng& rng) {
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return population[a].j() < population[b].j(); });

  std::vector<Individual> next;
  next.reserve(ga.pop_size);
  std::set<std::string> keys;
  for (int i = 0; i < ga.n_elite && i < static_cast<int>(order.size()); ++i) {
    Individual e = population[order[i]];
    e.origin = Origin::kElitism;
    e.generation = generation;
    keys.insert(config_key(e.config));
    next.push_back(std::move(e));
  }

  auto push_child = [&](Chromosome c, Origin origin) {
    std::string key = config_key(decode(c, space));
    for (int attempt = 0; attempt < ga.duplicate_retries && (keys.count(key) || cache.count(key)); ++attempt) {
      c = mutate(c, ga.mutation_rate, rng);
      key = config_key(decode(c, space));
    }
    Individual ind;
    ind.chromosome = std::move(c);
    ind.config = decode(ind.chromosome, space);
    ind.origin = origin;
    ind.generation = generation;
    keys.insert(key);
    next.push_back(std::move(ind));
  };

  const auto pick = [&]() -> const Individual& {
    return population[tournament_select(population, ga.tournament_size, ga.tournament_p, rng)];
  };
  while (static_cast<int>(next.size()) < ga.pop_size) {
    const double r = uniform01(rng);
    if (r < ga.p_replication) {
      push_child(pick().chromosome, Origin::kReplication);
    } else if (r < ga.p_replication + ga.p_crossover) {
      const Chromosome& a = pick().chromosome;
      const Chromosome& b = pick().chromosome;
      auto [c1, c2] = crossover(a, b, rng);
      push_child(std::move(c1), Origin::kCrossover);
      if (static_cast<int>(next.size()) < ga.pop_size) push_child(std::move(c2), Origin::kCrossover);
    } else {
      push_child(mutate(pick().chromosome, ga.mutation_rate, rng), Origin::kMutation);
    }
  }
  return next;
}

namespace {

// Evaluates every unevaluated individual, running each distinct config once.
int evaluate_population(std::vector<Individual>& pop, EvalCache& cache, const Evaluator& evaluator,
                        std::uint64_t master_seed, std::uint64_t& counter, const CostComponents& failure_cost,
                        unsigned parallel) {
  struct Pending {
    std::string key;
    LoopConfig config;
    std::uint64_t seed;
    CostComponents cost;
  };
  std::vector<Pending> pending;
  std::set<std::string> queued;
  for (const auto& ind : pop) {
    if (ind.cost) continue;
    std::string key = config_key(ind.config);
    if (cache.count(key) || queued.count(key)) continue;
    queued.insert(key);
    pending.push_back({std::move(key), ind.config, derive_seed(master_seed, {1, counter++}), {}});
  }
  parallel_for(pending.size(), parallel, [&](std::size_t i) {
    try {
      pending[i].cost = evaluator(pending[i].config, pending[i].seed);
    } catch (const std::exception&) {
      pending[i].cost = failure_cost;
    }
  });
  for (auto& p : pending) cache.emplace(p.key, std::make_pair(p.cost, p.seed));
  for (auto& ind : pop) {
    const auto& hit = cache.at(config_key(ind.config));
    ind.cost = hit.first;
    ind.seed = hit.second;
  }
  return static_cast<int>(pending.size());
}

}  // namespace

GaResult run_ga(ScenarioTag tag, const GaConfig& ga, const Evaluator& evaluator, std::uint64_t master_seed,
                const CostComponents& failure_cost, const GenerationObserver& observer) {
  validate(ga);
  Rng rng(derive_seed(master_seed, {0}));
  ParameterSpace space(tag, ga.coarse_generations > 0 ? Resolution::kCoarse : Resolution::kFine);
  EvalCache cache;
  std::uint64_t counter = 0;
  GaResult result;
  std::vector<Individual> pop;
  int stagnant = 0;

  for (int g = 1; g <= ga.max_generations; ++g) {
    if (g == 1) {
      pop = lhs_init(space, ga.pop_size, rng);
    } else {
      if (g == ga.coarse_generations + 1) {
        space = ParameterSpace(tag, Resolution::kFine);
        for (auto& ind : pop) {
          ind.chromosome = encode(ind.config, space);
          ind.config = decode(ind.chromosome, space);
        }
      }
      pop = evolve(pop, ga, space, cache, g, rng);
    }
    GenerationStats stats;
    stats.index = g;
    stats.resolution = space.resolution();
    stats.new_evaluations = evaluate_population(pop, cache, evaluator, master_seed, counter, failure_cost, ga.parallel);
    stats.population = pop;
    stats.best = *std::min_element(pop.begin(), pop.end(),
                                   [](const Individual& a, const Individual& b) { return a.j() < b.j(); });
    std::vector<double> costs;
    for (const auto& ind : pop) costs.push_back(ind.j());
    std::sort(costs.begin(), costs.end());
    const std::size_t n = costs.size();
    stats.median = n % 2 ? costs[n / 2] : 0.5 * (costs[n / 2 - 1] + costs[n / 2]);

    if (g == 1 || stats.best.j() < result.best.j()) {
      result.best = stats.best;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    if (g == ga.coarse_generations) stagnant = 0;
    if (observer) observer(stats);
    result.generations.push_back(std::move(stats));
    if (stagnant >= ga.stagnation_limit && g < ga.max_generations) {
      result.termination = Termination::kStagnation;
      break;
    }
  }
  result.unique_evaluations = cache.size();
  return result;
}

}  // namespace gnsstune

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnsstune/cost.hpp"
#include "gnsstune/random.hpp"
#include "gnsstune/tracking.hpp"

namespace gnsstune {

enum class Resolution { kCoarse, kFine };

std::string_view to_string(Resolution r);

struct ParamSpec {
  std::string name;
  std::vector<double> levels;
  int bits = 0;
  bool categorical = false;
};

/// Discretized loop-parameter space. Parameters appear in the fixed order
/// t_int (static only), pll_bw, pll_narrow_pct, pll_order, dll_bw,
/// dll_narrow_pct, dll_order, fll_bw. Each is coded in plain binary,
/// most significant bit first, with codes past the last level clamped to it.
class ParameterSpace {
 public:
  ParameterSpace(ScenarioTag tag, Resolution resolution);

  ScenarioTag scenario() const { return tag_; }
  Resolution resolution() const { return resolution_; }
  bool t_int_active() const { return tag_ == ScenarioTag::kStatic; }
  const std::vector<ParamSpec>& params() const { return params_; }
  int length() const { return length_; }

 private:
  ScenarioTag tag_;
  Resolution resolution_;
  std::vector<ParamSpec> params_;
  int length_ = 0;
};

using Chromosome = std::vector<std::uint8_t>;

/// Nearest-level coding of each parameter. Throws ConfigError if cfg is out of range.
Chromosome encode(const LoopConfig& cfg, const ParameterSpace& space);
/// Throws std::invalid_argument on a length mismatch.
LoopConfig decode(const Chromosome& chromosome, const ParameterSpace& space);
/// Level indices per parameter (after clamping).
std::vector<int> level_indices(const Chromosome& chromosome, const ParameterSpace& space);
Chromosome from_indices(const std::vector<int>& indices, const ParameterSpace& space);

std::string to_hex(const Chromosome& c);
std::string to_bits(const Chromosome& c);

/// Stable text key of a decoded configuration.
std::string config_key(const LoopConfig& cfg);

enum class Origin { kRandom, kElitism, kReplication, kCrossover, kMutation };
std::string_view to_string(Origin o);

struct Individual {
  Chromosome chromosome;
  LoopConfig config;
  std::optional<CostComponents> cost;
  Origin origin = Origin::kRandom;
  int generation = 0;
  std::uint64_t seed = 0;  // evaluation seed (of the cached evaluation)

  double j() const { return cost ? cost->j_total : std::numeric_limits<double>::infinity(); }
};

struct GaConfig {
  int pop_size = 100;
  int max_generations = 10;
  double p_replication = 0.0;
  double p_crossover = 0.5;
  double p_mutation = 0.5;
  int n_elite = 1;
  double mutation_rate = 0.06;
  int tournament_size = 7;
  double tournament_p = 1.0;
  int stagnation_limit = 3;
  int coarse_generations = 5;
  int duplicate_retries = 10;
  unsigned parallel = 1;
};

/// Throws ConfigError on inconsistent settings.
void validate(const GaConfig& ga);

/// n x dims unit samples; in every column each of the n strata
/// [k/n, (k+1)/n) holds exactly one sample.
std::vector<std::vector<double>> lhs_unit_samples(int n, int dims, Rng& rng);

/// LHS over level indices for non-categorical parameters; categorical ones
/// are drawn uniformly over their levels.
std::vector<Individual> lhs_init(const ParameterSpace& space, int n, Rng& rng);

/// Index of the winner among k distinct uniformly drawn individuals: with
/// probability p the lowest cost, otherwise a uniform pick among the k.
/// Throws std::invalid_argument if the population is smaller than k.
std::size_t tournament_select(const std::vector<Individual>& population, int k, double p, Rng& rng);

/// Single cut uniform in [1, L-1].
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, Rng& rng);

/// Independent flips at `rate`; flips one uniformly chosen bit if none did.
Chromosome mutate(const Chromosome& c, double rate, Rng& rng);

/// Evaluation cache keyed by decoded configuration.
using EvalCache = std::map<std::string, std::pair<CostComponents, std::uint64_t>>;

/// Builds the next (unevaluated, except elites) generation.
std::vector<Individual> evolve(const std::vector<Individual>& population, const GaConfig& ga,
                               const ParameterSpace& space, const EvalCache& cache, int generation, Rng& rng);

using Evaluator = std::function<CostComponents(const LoopConfig&, std::uint64_t seed)>;

struct GenerationStats {
  int index = 0;
  Resolution resolution = Resolution::kCoarse;
  std::vector<Individual> population;
  Individual best;
  double median = 0.0;
  int new_evaluations = 0;
};

enum class Termination { kCompleted, kStagnation };
std::string_view to_string(Termination t);

struct GaResult {
  std::vector<GenerationStats> generations;
  Individual best;
  Termination termination = Termination::kCompleted;
  std::size_t unique_evaluations = 0;
};

using GenerationObserver = std::function<void(const GenerationStats&)>;

/// Coarse generations 1..ga.coarse_generations, then fine. Individuals are
/// evaluated at most once per distinct configuration; evaluation seeds are
/// derive_seed(master_seed, {1, n}) for the n-th distinct evaluation, so
/// results do not depend on ga.parallel. An evaluator exception charges
/// `failure_cost`. Stops after ga.stagnation_limit generations without a
/// strict improvement; the counter restarts at the resolution switch.
GaResult run_ga(ScenarioTag tag, const GaConfig& ga, const Evaluator& evaluator, std::uint64_t master_seed,
                const CostComponents& failure_cost, const GenerationObserver& observer = {});

}  // namespace gnsstune

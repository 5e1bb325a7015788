#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "gnsstune/config.hpp"
#include "gnsstune/cost.hpp"
#include "gnsstune/navigation.hpp"
#include "gnsstune/optimizer.hpp"

namespace gnsstune {

/// Everything held fixed while loop parameters are tuned: the truth
/// trajectory, the receiver environment and the cost bounds.
struct Scenario {
  RunConfig config;
  std::shared_ptr<const GroundTruth> truth;
  ScenarioEnv env;
  NormalizationBounds bounds;
  std::optional<RocketParams> rocket;
  std::optional<RocketSummary> rocket_summary;
};

/// Truth at 20 Hz (rocket integrated at 100 Hz and kept at that rate).
std::shared_ptr<const GroundTruth> build_truth(const RunConfig& cfg);
ScenarioEnv build_env(const RunConfig& cfg);
Scenario build_scenario(const RunConfig& cfg);

struct Evaluation {
  CostComponents cost;
  ReceiverRun run;
  bool failed = false;
  std::string failure;
};

/// One closed-loop receiver run and its cost. Any failure (rejected loop
/// configuration, no usable solution) is charged the worst-case cost.
Evaluation evaluate_config(const Scenario& scenario, const LoopConfig& loop, std::uint64_t seed,
                           unsigned threads = 1);

/// GA evaluator over a shared scenario; each call runs single-threaded so the
/// GA can parallelize across individuals.
Evaluator make_evaluator(std::shared_ptr<const Scenario> scenario);

/// Per-ECEF-axis 3 x RMS error over solutions with t >= t_min; invalid
/// solutions are skipped.
struct AxisErrors {
  Vec3 position_3sigma = Vec3::Zero();
  Vec3 velocity_3sigma = Vec3::Zero();
  double max_position = 0.0;
  double max_velocity = 0.0;
  std::size_t epochs = 0;
};
AxisErrors axis_errors(const GroundTruth& truth, const std::vector<PvtSolution>& solutions, double t_min = 0.0);

}  // namespace gnsstune

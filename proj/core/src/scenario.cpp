#include "gnsstune/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "gnsstune/error.hpp"
#include "gnsstune/random.hpp"

namespace gnsstune {

namespace {

RocketParams rocket_params(const RunConfig& cfg) {
  RocketParams p = default_rocket_params();
  p.launch_site = cfg.site;
  p.launch_azimuth_deg = cfg.launch_azimuth_deg;
  p.launch_elevation_deg = cfg.launch_elevation_deg;
  return p;
}

}  // namespace

std::shared_ptr<const GroundTruth> build_truth(const RunConfig& cfg) {
  switch (cfg.scenario) {
    case ScenarioTag::kStatic: return std::make_shared<GroundTruth>(static_truth(cfg.site, cfg.duration_s, 20.0));
    case ScenarioTag::kRocket: return std::make_shared<GroundTruth>(simulate_rocket(rocket_params(cfg), cfg.duration_s));
    case ScenarioTag::kLeo:
      return std::make_shared<GroundTruth>(propagate_leo(cfg.leo, LeoPerturbationParams{}, cfg.duration_s));
  }
  throw ConfigError("unknown scenario");
}

ScenarioEnv build_env(const RunConfig& cfg) {
  ScenarioEnv env = default_env(cfg.scenario);
  env.cn0_dbhz = cfg.cn0_dbhz;
  env.visibility.mask_deg = cfg.elevation_mask_deg;
  env.channel.init_code_error_chips = cfg.init_code_error_chips;
  env.channel.init_freq_error_hz = cfg.init_freq_error_hz;
  env.condition_seed = derive_seed(cfg.seed, {2});
  return env;
}

Scenario build_scenario(const RunConfig& cfg) {
  validate(cfg);
  Scenario s;
  s.config = cfg;
  s.truth = build_truth(cfg);
  s.env = build_env(cfg);
  s.bounds = compute_bounds(cfg.scenario);
  if (cfg.scenario == ScenarioTag::kRocket) {
    s.rocket = rocket_params(cfg);
    s.rocket_summary = summarize_rocket(*s.truth, *s.rocket);
  }
  return s;
}

Evaluation evaluate_config(const Scenario& scenario, const LoopConfig& loop, std::uint64_t seed, unsigned threads) {
  Evaluation ev;
  try {
    validate(loop);
    ev.run = run_receiver(scenario.truth, loop, scenario.env, seed, threads);
    const bool any_tracked = std::any_of(ev.run.channels.begin(), ev.run.channels.end(),
                                         [](const ChannelOutcome& c) { return !c.rejected; });
    if (!any_tracked) {
      ev.failed = true;
      ev.failure = ev.run.channels.empty() ? "no satellite visible" : ev.run.channels.front().reject_reason;
      ev.cost = worst_case_cost(scenario.bounds);
      return ev;
    }
    ev.cost = evaluate(*scenario.truth, ev.run.solutions, scenario.bounds);
  } catch (const Error& e) {
    ev.failed = true;
    ev.failure = e.what();
    ev.cost = worst_case_cost(scenario.bounds);
  }
  return ev;
}

Evaluator make_evaluator(std::shared_ptr<const Scenario> scenario) {
  return [scenario](const LoopConfig& loop, std::uint64_t seed) {
    return evaluate_config(*scenario, loop, seed, 1).cost;
  };
}

AxisErrors axis_errors(const GroundTruth& truth, const std::vector<PvtSolution>& solutions, double t_min) {
  AxisErrors out;
  Vec3 sp = Vec3::Zero();
  Vec3 sv = Vec3::Zero();
  for (const auto& s : solutions) {
    if (!s.valid || s.t < t_min - 1e-9 || s.t < truth.start_time() || s.t > truth.end_time()) continue;
    const EcefState tr = truth.at(s.t);
    const Vec3 dp = s.position - tr.position;
    const Vec3 dv = s.velocity - tr.velocity;
    sp += dp.cwiseAbs2();
    sv += dv.cwiseAbs2();
    out.max_position = std::max(out.max_position, dp.norm());
    out.max_velocity = std::max(out.max_velocity, dv.norm());
    ++out.epochs;
  }
  if (out.epochs > 0) {
    const double n = static_cast<double>(out.epochs);
    out.position_3sigma = 3.0 * (sp / n).cwiseSqrt();
    out.velocity_3sigma = 3.0 * (sv / n).cwiseSqrt();
  }
  return out;
}

}  // namespace gnsstune

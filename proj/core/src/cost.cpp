#include "gnsstune/cost.hpp"

#include <algorithm>
#include <cmath>

#include "gnsstune/error.hpp"

namespace gnsstune {

namespace {

constexpr double kHorizontal95 = 1.6;  // m, radial
constexpr double kVertical95 = 2.4;    // m
constexpr double kMaxSigmaScale = 5.0;

template <typename ErrFn>
ErrorCost mean_squared(const GroundTruth& gt, const std::vector<PvtSolution>& nav, double penalty, ErrFn err) {
  if (nav.empty() || gt.empty()) throw EvaluationError("no solution epochs to evaluate");
  double sum = 0.0;
  std::size_t n = 0;
  std::size_t missing = 0;
  for (const auto& s : nav) {
    if (s.t < gt.start_time() - 1e-9 || s.t > gt.end_time() + 1e-9) continue;
    ++n;
    if (s.valid) {
      sum += err(gt.at(s.t), s).squaredNorm();
    } else {
      sum += penalty;
      ++missing;
    }
  }
  if (n == 0) throw EvaluationError("solutions do not overlap the ground truth");
  return {sum / static_cast<double>(n), static_cast<double>(missing) / static_cast<double>(n)};
}

}  // namespace

double velocity_threshold(ScenarioTag tag) {
  switch (tag) {
    case ScenarioTag::kStatic: return 0.05;
    case ScenarioTag::kRocket: return 0.5;
    case ScenarioTag::kLeo: return 0.1;
  }
  throw ConfigError("unknown scenario tag");
}

NormalizationBounds compute_bounds(ScenarioTag tag) {
  const double sigma_h = kHorizontal95 / (2.0 * std::sqrt(2.0));
  const double sigma_v = kVertical95 / 2.0;
  const double sigma_s = velocity_threshold(tag) / (2.0 * std::sqrt(3.0));
  const double k2 = kMaxSigmaScale * kMaxSigmaScale;

  NormalizationBounds b;
  b.tag = tag;
  b.j_pos_min = 2.0 * sigma_h * sigma_h + sigma_v * sigma_v;
  b.j_pos_max = k2 * b.j_pos_min;
  b.j_vel_min = 3.0 * sigma_s * sigma_s;
  b.j_vel_max = k2 * b.j_vel_min;
  return b;
}

double missing_position_penalty(const NormalizationBounds& b) { return 4.0 * b.j_pos_max; }
double missing_velocity_penalty(const NormalizationBounds& b) { return 4.0 * b.j_vel_max; }

ErrorCost position_cost(const GroundTruth& gt, const std::vector<PvtSolution>& nav, const NormalizationBounds& b) {
  return mean_squared(gt, nav, missing_position_penalty(b),
                      [](const EcefState& truth, const PvtSolution& s) -> Vec3 { return truth.position - s.position; });
}

ErrorCost velocity_cost(const GroundTruth& gt, const std::vector<PvtSolution>& nav, const NormalizationBounds& b) {
  return mean_squared(gt, nav, missing_velocity_penalty(b),
                      [](const EcefState& truth, const PvtSolution& s) -> Vec3 { return truth.velocity - s.velocity; });
}

CostComponents total_cost(double jp, double jv, const NormalizationBounds& b) {
  CostComponents c;
  c.j_pos = jp;
  c.j_vel = jv;
  c.j_pos_norm = std::max(0.0, (jp - b.j_pos_min) / (b.j_pos_max - b.j_pos_min));
  c.j_vel_norm = std::max(0.0, (jv - b.j_vel_min) / (b.j_vel_max - b.j_vel_min));
  c.j_total = c.j_pos_norm + c.j_vel_norm;
  return c;
}

CostComponents evaluate(const GroundTruth& gt, const std::vector<PvtSolution>& nav, const NormalizationBounds& b) {
  const ErrorCost p = position_cost(gt, nav, b);
  const ErrorCost v = velocity_cost(gt, nav, b);
  CostComponents c = total_cost(p.value, v.value, b);
  c.missing_fraction = p.missing_fraction;
  return c;
}

CostComponents worst_case_cost(const NormalizationBounds& b) {
  CostComponents c = total_cost(missing_position_penalty(b), missing_velocity_penalty(b), b);
  c.missing_fraction = 1.0;
  return c;
}

}  // namespace gnsstune

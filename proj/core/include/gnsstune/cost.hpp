#pragma once

#include <vector>

#include "gnsstune/dynamics.hpp"
#include "gnsstune/navigation.hpp"

namespace gnsstune {

struct NormalizationBounds {
  double j_pos_min = 0.0;  // m^2
  double j_pos_max = 0.0;
  double j_vel_min = 0.0;  // m^2/s^2
  double j_vel_max = 0.0;
  ScenarioTag tag = ScenarioTag::kStatic;
};

struct CostComponents {
  double j_pos = 0.0;
  double j_vel = 0.0;
  double j_pos_norm = 0.0;
  double j_vel_norm = 0.0;
  double j_total = 0.0;
  double missing_fraction = 0.0;
};

/// 95 % speed-error threshold used for the velocity bounds, m/s.
double velocity_threshold(ScenarioTag tag);

/// Closed-form bounds from the nominal accuracy figures taken as 2 sigma:
/// horizontal 1.6 m radial, vertical 2.4 m, speed per scenario. The max
/// bounds scale sigma by 5.
NormalizationBounds compute_bounds(ScenarioTag tag);

/// Squared error charged for an epoch without a valid solution.
double missing_position_penalty(const NormalizationBounds& b);
double missing_velocity_penalty(const NormalizationBounds& b);

struct ErrorCost {
  double value = 0.0;
  double missing_fraction = 0.0;
};

/// Mean squared 3-D position error over the solution epochs, compared with
/// the truth at each solution time. Throws EvaluationError if `nav` is empty
/// or has no epoch inside the truth span.
ErrorCost position_cost(const GroundTruth& gt, const std::vector<PvtSolution>& nav, const NormalizationBounds& b);
ErrorCost velocity_cost(const GroundTruth& gt, const std::vector<PvtSolution>& nav, const NormalizationBounds& b);

/// Min-max normalized sum; components clamp at 0 from below only.
CostComponents total_cost(double jp, double jv, const NormalizationBounds& b);

CostComponents evaluate(const GroundTruth& gt, const std::vector<PvtSolution>& nav, const NormalizationBounds& b);

/// Cost of a run with no valid epoch at all.
CostComponents worst_case_cost(const NormalizationBounds& b);

}  // namespace gnsstune

#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "gpform/factor_graph.hpp"
#include "gpform/pipeline.hpp"

namespace gpform {

/// A solved mission that can absorb goal changes and newly observed
/// obstacles. Replanning freezes every support state at or before the
/// change time and re-solves the suffix warm-started from the current
/// solution, so the already-executed prefix stays bit-identical.
struct PlanSession {
  FactorGraph graph;
  Trajectory solution;
  OccupancyGrid occupancy;  // raw map, before inflation
  double inflation = 0.3;
  double d0 = 0.5;
  AssignmentMatrix final_assignment;
  double goal_heading = 0.0;
  LmConfig lm;
  std::vector<SolveReport> history;

  static PlanSession from_pipeline(const PipelineResult& result);
};

struct ReplanOptions {
  /// true: incremental update (frozen prefix, suffix warm-started from the
  /// current solution). false: from-scratch baseline, the whole modified
  /// problem restarted from the straight-line initialization.
  bool warm_start = true;
};

/// Move the team goal at `change_time`: states up to the change stay fixed,
/// the goal prior is re-targeted via the final assignment, and the suffix is
/// re-optimized.
PlanSession replan_goal(const PlanSession& session, const Vec2& new_team_goal, double change_time,
                        const ReplanOptions& options = {});

/// Mark the given cells occupied, rebuild the inflated SDF, and re-optimize
/// the suffix against it.
PlanSession replan_obstacle(const PlanSession& session,
                            const std::vector<std::pair<int, int>>& new_obstacle_cells,
                            double change_time, const ReplanOptions& options = {});

}  // namespace gpform

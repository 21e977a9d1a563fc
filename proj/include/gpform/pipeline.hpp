#pragma once

#include <memory>
#include <vector>

#include "gpform/factor_graph.hpp"
#include "gpform/global_planner.hpp"
#include "gpform/scenario.hpp"
#include "gpform/task_assignment.hpp"

namespace gpform {

/// Wall time per pipeline stage. Map rasterization/SDF construction is
/// environment preparation and reported separately from the three planning
/// stages that make up the total.
struct StageTimes {
  double map_preparation_ms = 0.0;
  double formation_planning_ms = 0.0;
  double task_assignment_ms = 0.0;
  double trajectory_optimization_ms = 0.0;

  double total_ms() const {
    return formation_planning_ms + task_assignment_ms + trajectory_optimization_ms;
  }
};

struct PipelineResult {
  Scenario scenario;
  OccupancyGrid occupancy;
  OccupancyGrid inflated;
  std::shared_ptr<const SignedDistanceGrid> sdf;
  FormationPlan plan;  // entries carry their assignments
  Eigen::Matrix2Xd start_positions;
  Eigen::Matrix2Xd goal_positions;
  FactorGraph graph;
  Trajectory initial;
  Trajectory solution;
  SolveReport report;
  StageTimes stages;
};

/// Full mission: rasterize + inflate + SDF, plan formations and schedule,
/// chain the slot assignments, build the factor graph, and solve.
PipelineResult run_pipeline(const Scenario& scenario);

struct Sample {
  double t = 0.0;
  Eigen::Matrix2Xd positions;
  Eigen::Matrix2Xd velocities;
};

/// GP interpolation of the solved trajectory at one time.
SupportState sample_state(const FactorGraph& graph, const Trajectory& solution, double t);

/// `count` uniform samples over the mission horizon (endpoints included).
std::vector<Sample> sample_uniform(const FactorGraph& graph, const Trajectory& solution,
                                   int count);

struct Metrics {
  double min_pairwise_distance = 0.0;  // infinity for a single robot
  double min_obstacle_distance = 0.0;
  std::vector<double> max_formation_error;  // per plan entry, over its hold window
};

/// Recompute the reported metrics from a sample set (the export checks its
/// own files this way).
Metrics compute_metrics(const PipelineResult& result, const std::vector<Sample>& samples);

}  // namespace gpform

#include "gpform/replanner.hpp"

#include <cmath>
#include <stdexcept>

#include "gpform/errors.hpp"
#include "gpform/task_assignment.hpp"

namespace gpform {

PlanSession PlanSession::from_pipeline(const PipelineResult& result) {
  PlanSession s;
  s.graph = result.graph;
  s.solution = result.solution;
  s.occupancy = result.occupancy;
  s.inflation = result.scenario.inflation;
  s.d0 = result.scenario.d0;
  s.final_assignment = result.plan.entries.back().formation.assignment;
  s.goal_heading = result.plan.entries.back().formation.heading;
  s.lm = result.scenario.lm;
  s.history.push_back(result.report);
  return s;
}

namespace {

// Largest support index at or before the change time (ties snap earlier).
int freeze_index(const std::vector<double>& times, double change_time) {
  if (change_time < times.front() || change_time >= times.back())
    throw std::invalid_argument("replan: change_time outside the mission horizon");
  int k = 0;
  while (k + 1 < static_cast<int>(times.size()) && times[k + 1] <= change_time + 1e-9) ++k;
  return k;
}

PlanSession resolve(PlanSession session, double change_time, const ReplanOptions& options,
                    const Eigen::Matrix2Xd& goal_positions) {
  if (options.warm_start) {
    // Incremental style: the executed prefix is frozen and the suffix starts
    // from the current solution.
    session.graph.first_free_state = freeze_index(session.graph.support_times, change_time) + 1;
    auto [solution, report] = solve(session.graph, session.solution, session.lm);
    session.solution = std::move(solution);
    session.history.push_back(std::move(report));
    return session;
  }

  // From-scratch baseline: the whole modified problem restarted from the
  // straight-line initialization (the validity check freeze_index also vets
  // the change time here).
  freeze_index(session.graph.support_times, change_time);
  session.graph.first_free_state = 0;
  Trajectory init = session.solution;
  const auto& times = session.graph.support_times;
  const double t0 = times.front();
  const double horizon = times.back() - t0;
  const Eigen::Matrix2Xd start = session.solution.front().positions;
  for (int k = 0; k < session.graph.num_states(); ++k) {
    const double s = (times[k] - t0) / horizon;
    init[k].positions = start + s * (goal_positions - start);
    init[k].velocities = (goal_positions - start) / horizon;
  }
  auto [solution, report] = solve(session.graph, init, session.lm);
  session.solution = std::move(solution);
  session.history.push_back(std::move(report));
  return session;
}

}  // namespace

PlanSession replan_goal(const PlanSession& session, const Vec2& new_team_goal, double change_time,
                        const ReplanOptions& options) {
  PlanSession next = session;
  const Eigen::Matrix2Xd goals =
      goals_centered(next.final_assignment, next.d0, new_team_goal, next.goal_heading);
  for (Factor& f : next.graph.factors) {
    if (f.kind != FactorKind::kGoalPrior) continue;
    Eigen::VectorXd target = Eigen::VectorXd::Zero(next.graph.state_dim());
    target.head(2 * next.graph.num_robots) =
        Eigen::Map<const Eigen::VectorXd>(goals.data(), 2 * next.graph.num_robots);
    f.target = std::move(target);
  }
  return resolve(std::move(next), change_time, options, goals);
}

PlanSession replan_obstacle(const PlanSession& session,
                            const std::vector<std::pair<int, int>>& new_obstacle_cells,
                            double change_time, const ReplanOptions& options) {
  PlanSession next = session;
  for (const auto& [ix, iy] : new_obstacle_cells) {
    if (!next.occupancy.in_bounds(ix, iy))
      throw std::invalid_argument("replan_obstacle: cell outside the map");
    next.occupancy.set(ix, iy, true);
  }
  next.graph.sdf = std::make_shared<SignedDistanceGrid>(
      build_sdf(inflate(next.occupancy, next.inflation)));

  // Goals keep their current targets; reuse them for a cold initialization.
  Eigen::Matrix2Xd goals = next.solution.back().positions;
  for (const Factor& f : next.graph.factors) {
    if (f.kind != FactorKind::kGoalPrior) continue;
    goals = Eigen::Map<const Eigen::Matrix2Xd>(f.target.data(), 2, next.graph.num_robots);
    break;
  }
  return resolve(std::move(next), change_time, options, goals);
}

}  // namespace gpform

#include "gpform/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpform/cost_factors.hpp"
#include "gpform/errors.hpp"

namespace gpform {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Greedy row-major matching of explicit start positions to the first
// formation's slots (deterministic, nearest robot per slot).
AssignmentMatrix match_starts(const Eigen::Matrix2Xd& starts, const FormationSpec& formation,
                              const Vec2& anchor_center) {
  const int n = static_cast<int>(starts.cols());
  AssignmentMatrix a(formation.rows, formation.cols, n);
  const AssignmentMatrix ident = AssignmentMatrix::identity(formation.rows, formation.cols, n);
  const Eigen::Matrix2Xd slots = goals_centered(ident, formation.spacing, anchor_center,
                                                formation.heading);
  std::vector<bool> used(n, false);
  int placed = 0;
  for (int r = 0; r < formation.rows && placed < n; ++r) {
    for (int c = 0; c < formation.cols && placed < n; ++c) {
      const int slot_id = r * formation.cols + c;
      if (slot_id >= n) break;  // virtual tail slots
      const Vec2 target = slots.col(slot_id);
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        const double d = (starts.col(i) - target).norm();
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      used[best] = true;
      a.at(r, c) = best;
      ++placed;
    }
  }
  int next_virtual = n;
  for (int& id : a.slot_to_robot)
    if (id == -1) id = next_virtual++;
  a.validate();
  return a;
}

}  // namespace

PipelineResult run_pipeline(const Scenario& scenario) {
  scenario.validate();

  PipelineResult res;
  res.scenario = scenario;

  // Environment preparation.
  auto t0 = Clock::now();
  res.occupancy = build_occupancy(scenario);
  res.inflated = inflate(res.occupancy, scenario.inflation);
  res.sdf = std::make_shared<SignedDistanceGrid>(build_sdf(res.inflated));
  res.stages.map_preparation_ms = ms_since(t0);

  // Formation planning.
  t0 = Clock::now();
  const PiecewisePath path = scenario_path(scenario);
  FormationSpec fixed;
  const FormationSpec* fixed_ptr = nullptr;
  if (scenario.fixed_formation) {
    fixed.rows = scenario.fixed_formation->first;
    fixed.cols = scenario.fixed_formation->second;
    fixed_ptr = &fixed;
  }
  res.plan = plan_formations(res.inflated, path, scenario.num_robots, scenario.d0, scenario.tau,
                             scenario.total_time, fixed_ptr, scenario.inflation);
  res.stages.formation_planning_ms = ms_since(t0);

  // Task assignment: identity block start, then the diagonal-cut chain.
  t0 = Clock::now();
  const int n = scenario.num_robots;
  FormationSpec& first = res.plan.entries.front().formation;
  AssignmentMatrix current;
  if (scenario.start_positions) {
    res.start_positions = *scenario.start_positions;
    current = match_starts(res.start_positions, first, scenario.start);
  } else {
    current = AssignmentMatrix::identity(first.rows, first.cols, n);
    res.start_positions = goals_centered(current, scenario.d0, scenario.start, first.heading);
  }
  for (auto& entry : res.plan.entries) {
    current = assign_transition(current, entry.formation.rows, entry.formation.cols);
    entry.formation.assignment = current;
  }
  const auto& last_entry = res.plan.entries.back();
  res.goal_positions = goals_centered(last_entry.formation.assignment, scenario.d0,
                                      scenario.goal_point(), last_entry.formation.heading);
  res.stages.task_assignment_ms = ms_since(t0);

  // Trajectory optimization.
  t0 = Clock::now();
  GraphSpec gspec;
  gspec.num_robots = n;
  gspec.support_times.resize(scenario.num_support_states);
  for (int i = 0; i < scenario.num_support_states; ++i)
    gspec.support_times[i] = scenario.total_time * i / (scenario.num_support_states - 1);
  gspec.qc_scale = scenario.qc_scale;
  gspec.n_ip = scenario.n_ip;
  gspec.hinge = scenario.hinge;
  gspec.start_positions = res.start_positions;
  gspec.goal_positions = res.goal_positions;
  gspec.sdf = res.sdf;
  for (const auto& entry : res.plan.entries)
    gspec.holds.push_back({entry.formation, entry.hold.t_start, entry.hold.t_end});

  auto [graph, init] = build_graph(gspec);
  res.graph = std::move(graph);
  res.initial = std::move(init);
  auto [solution, report] = solve(res.graph, res.initial, scenario.lm);
  res.solution = std::move(solution);
  res.report = std::move(report);
  res.stages.trajectory_optimization_ms = ms_since(t0);

  return res;
}

SupportState sample_state(const FactorGraph& graph, const Trajectory& solution, double t) {
  const auto& times = graph.support_times;
  if (t <= times.front()) return solution.front();
  if (t >= times.back()) return solution.back();
  size_t k = 0;
  while (k + 2 < times.size() && times[k + 1] < t) ++k;
  return interpolate(solution[k], solution[k + 1], t, graph.qc_scale).state;
}

std::vector<Sample> sample_uniform(const FactorGraph& graph, const Trajectory& solution,
                                   int count) {
  if (count < 2) throw std::invalid_argument("sample_uniform: need at least two samples");
  std::vector<Sample> out;
  out.reserve(count);
  const double t0 = graph.support_times.front();
  const double t1 = graph.support_times.back();
  for (int i = 0; i < count; ++i) {
    const double t = t0 + (t1 - t0) * i / (count - 1);
    const SupportState s = sample_state(graph, solution, t);
    out.push_back({t, s.positions, s.velocities});
  }
  return out;
}

Metrics compute_metrics(const PipelineResult& result, const std::vector<Sample>& samples) {
  Metrics m;
  m.min_pairwise_distance = std::numeric_limits<double>::infinity();
  m.min_obstacle_distance = std::numeric_limits<double>::infinity();
  m.max_formation_error.assign(result.plan.entries.size(), 0.0);

  std::vector<FormationLayout> layouts;
  for (const auto& entry : result.plan.entries)
    layouts.push_back(FormationLayout::from_spec(entry.formation));

  for (const Sample& s : samples) {
    const int n = static_cast<int>(s.positions.cols());
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j)
        m.min_pairwise_distance =
            std::min(m.min_pairwise_distance, (s.positions.col(i) - s.positions.col(j)).norm());
      m.min_obstacle_distance =
          std::min(m.min_obstacle_distance, query_distance(*result.sdf, s.positions.col(i)).distance);
    }
    for (size_t h = 0; h < result.plan.entries.size(); ++h) {
      const auto& hold = result.plan.entries[h].hold;
      if (s.t < hold.t_start - 1e-9 || s.t > hold.t_end + 1e-9) continue;
      const FormationLayout& layout = layouts[h];
      for (int i = 0; i < n; ++i) {
        if (i == layout.origin_robot) continue;
        const double err = ((s.positions.col(i) - s.positions.col(layout.origin_robot)) -
                            layout.offsets.col(i))
                               .norm();
        m.max_formation_error[h] = std::max(m.max_formation_error[h], err);
      }
    }
  }
  return m;
}

}  // namespace gpform

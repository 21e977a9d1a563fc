#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpform/errors.hpp"
#include "gpform/export.hpp"
#include "gpform/pipeline.hpp"
#include "gpform/replanner.hpp"
#include "gpform/scenario.hpp"
#include "gpform/task_assignment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioInvalid = 2;
constexpr int kExitPlanningInfeasible = 3;
constexpr int kExitNumericFailure = 4;

std::pair<int, int> parse_dims_arg(const std::string& s) {
  const size_t x = s.find_first_of("xX");
  if (x == std::string::npos) throw CLI::ValidationError("dims must look like RxC");
  return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

gpform::Vec2 parse_point_arg(const std::string& s) {
  const size_t comma = s.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("point must look like x,y");
  return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

void print_plan_summary(const gpform::PipelineResult& res) {
  std::printf("plan: %d robots, %zu corridor segment(s)\n", res.scenario.num_robots,
              res.plan.entries.size());
  for (size_t i = 0; i < res.plan.entries.size(); ++i) {
    const auto& e = res.plan.entries[i];
    std::printf("  %zu: %dx%d  hold [%.3f, %.3f] s  corridor half-width %.3f m\n", i,
                e.formation.rows, e.formation.cols, e.hold.t_start, e.hold.t_end,
                e.corridor.half_width);
  }
  const auto samples = gpform::sample_uniform(res.graph, res.solution, 100);
  const auto metrics = gpform::compute_metrics(res, samples);
  std::printf("solver: %d accepted iterations, cost %.6g -> %.6g, %s\n", res.report.iterations,
              res.report.initial_cost, res.report.final_cost,
              res.report.converged ? "converged" : "not converged");
  std::printf("metrics: min pairwise %.3f m, min obstacle %.3f m\n", metrics.min_pairwise_distance,
              metrics.min_obstacle_distance);
  std::printf("stage ms: planning %.4f | assignment %.4f | optimization %.4f | total %.4f\n",
              res.stages.formation_planning_ms, res.stages.task_assignment_ms,
              res.stages.trajectory_optimization_ms, res.stages.total_ms());
}

int run_plan(const std::string& scenario_path, const std::string& outdir, bool poly,
             double sample_dt) {
  const gpform::Scenario sc = gpform::load_scenario(scenario_path);
  const gpform::PipelineResult res = gpform::run_pipeline(sc);
  print_plan_summary(res);
  if (!outdir.empty()) {
    gpform::ExportOptions opts;
    opts.with_polynomials = poly;
    opts.sample_dt = sample_dt;
    gpform::export_result(res, outdir, opts);
    std::printf("exported to %s\n", outdir.c_str());
  }
  return kExitOk;
}

int run_replan(const std::string& scenario_path, const std::string& outdir,
               const std::string& new_goal, const std::string& add_obstacle, double at,
               double sample_dt) {
  const gpform::Scenario sc = gpform::load_scenario(scenario_path);
  gpform::PipelineResult res = gpform::run_pipeline(sc);
  print_plan_summary(res);

  gpform::PlanSession session = gpform::PlanSession::from_pipeline(res);
  if (!new_goal.empty()) {
    session = gpform::replan_goal(session, parse_point_arg(new_goal), at);
    std::printf("replanned goal -> %s at t=%.3f s: %d accepted iterations\n", new_goal.c_str(), at,
                session.history.back().iterations);
  }
  if (!add_obstacle.empty()) {
    // x0,y0,x1,y1 box converted to map cells.
    std::vector<double> vals;
    std::string rest = add_obstacle;
    while (!rest.empty()) {
      const size_t comma = rest.find(',');
      vals.push_back(std::stod(rest.substr(0, comma)));
      rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
    }
    if (vals.size() != 4) throw CLI::ValidationError("--add-obstacle needs x0,y0,x1,y1");
    std::vector<std::pair<int, int>> cells;
    const auto& g = session.occupancy;
    for (int iy = 0; iy < g.height; ++iy)
      for (int ix = 0; ix < g.width; ++ix) {
        const gpform::Vec2 c = g.cell_center(ix, iy);
        if (c.x() >= vals[0] && c.y() >= vals[1] && c.x() <= vals[2] && c.y() <= vals[3])
          cells.emplace_back(ix, iy);
      }
    session = gpform::replan_obstacle(session, cells, at);
    std::printf("replanned with obstacle [%s] at t=%.3f s: %d accepted iterations\n",
                add_obstacle.c_str(), at, session.history.back().iterations);
  }

  if (!outdir.empty()) {
    gpform::ExportOptions opts;
    opts.sample_dt = sample_dt;
    gpform::export_result(res, outdir, opts);
    gpform::PipelineResult updated = res;
    updated.graph = session.graph;
    updated.solution = session.solution;
    updated.report = session.history.back();
    updated.occupancy = session.occupancy;
    updated.sdf = session.graph.sdf;
    gpform::export_result(updated, outdir + "/replan", opts);
    std::printf("exported to %s (updated run under replan/)\n", outdir.c_str());
  }
  return kExitOk;
}

int run_assign(const std::string& from, const std::string& to, int n) {
  const auto [r1, c1] = parse_dims_arg(from);
  const auto [r2, c2] = parse_dims_arg(to);
  const gpform::AssignmentMatrix a = gpform::AssignmentMatrix::identity(r1, c1, n);
  const gpform::AssignmentMatrix b = gpform::assign_transition(a, r2, c2);
  std::printf("from %dx%d (virtual slots as -1):\n%s", r1, c1,
              gpform::format_assignment(a).c_str());
  std::printf("to %dx%d:\n%s", r2, c2, gpform::format_assignment(b).c_str());
  return kExitOk;
}

int run_bench(const std::string& scenario_path, int repeat) {
  const gpform::Scenario sc = gpform::load_scenario(scenario_path);
  std::vector<double> plan_ms, assign_ms, opt_ms, total_ms;
  for (int i = 0; i < repeat; ++i) {
    const gpform::PipelineResult res = gpform::run_pipeline(sc);
    plan_ms.push_back(res.stages.formation_planning_ms);
    assign_ms.push_back(res.stages.task_assignment_ms);
    opt_ms.push_back(res.stages.trajectory_optimization_ms);
    total_ms.push_back(res.stages.total_ms());
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  std::printf("Computational time evaluation [ms], median of %d run(s)\n", repeat);
  std::printf("%-8s %-12s %-12s %-14s %s\n", "Robots", "Formation", "Task", "Trajectory", "Total");
  std::printf("%-8s %-12s %-12s %-14s %s\n", "", "planning", "assignment", "optimization", "");
  std::printf("%-8d %-12.4f %-12.4f %-14.4f %.4f\n", sc.num_robots, median(plan_ms),
              median(assign_ms), median(opt_ms), median(total_ms));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formation trajectory generation over GP factor graphs"};
  app.require_subcommand(1);

  std::string scenario_path, outdir, new_goal, add_obstacle, from_dims, to_dims;
  bool poly = false;
  double sample_dt = 0.05;
  double at = 0.0;
  int n_robots = 0, repeat = 5;

  CLI::App* plan = app.add_subcommand("plan", "Run the pipeline and export the results");
  plan->add_option("scenario", scenario_path, "Scenario file")->required();
  plan->add_option("-o,--out", outdir, "Output directory");
  plan->add_flag("--poly", poly, "Also export degree-7 polynomial coefficients");
  plan->add_option("--sample-dt", sample_dt, "Export sampling interval [s]");

  CLI::App* exp = app.add_subcommand("export", "Run the pipeline and export with polynomials");
  exp->add_option("scenario", scenario_path, "Scenario file")->required();
  exp->add_option("-o,--out", outdir, "Output directory")->required();
  exp->add_option("--sample-dt", sample_dt, "Export sampling interval [s]");

  CLI::App* replan = app.add_subcommand("replan", "Replan after a goal change or new obstacle");
  replan->add_option("scenario", scenario_path, "Scenario file")->required();
  replan->add_option("--new-goal", new_goal, "New team goal as x,y");
  replan->add_option("--add-obstacle", add_obstacle, "New obstacle box as x0,y0,x1,y1");
  replan->add_option("--at", at, "Change time [s]")->required();
  replan->add_option("-o,--out", outdir, "Output directory");
  replan->add_option("--sample-dt", sample_dt, "Export sampling interval [s]");

  CLI::App* assign = app.add_subcommand("assign", "Print a formation transition assignment");
  assign->add_option("--from", from_dims, "Old formation as RxC")->required();
  assign->add_option("--to", to_dims, "New formation as RxC")->required();
  assign->add_option("--n", n_robots, "Number of real robots")->required();

  CLI::App* bench = app.add_subcommand("bench", "Median per-stage wall times");
  bench->add_option("scenario", scenario_path, "Scenario file")->required();
  bench->add_option("--repeat", repeat, "Number of runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) return run_plan(scenario_path, outdir, poly, sample_dt);
    if (exp->parsed()) return run_plan(scenario_path, outdir, true, sample_dt);
    if (replan->parsed())
      return run_replan(scenario_path, outdir, new_goal, add_obstacle, at, sample_dt);
    if (assign->parsed()) return run_assign(from_dims, to_dims, n_robots);
    if (bench->parsed()) return run_bench(scenario_path, repeat);
  } catch (const gpform::PlanningInfeasibleError& e) {
    std::fprintf(stderr, "planning infeasible: %s\n", e.what());
    return kExitPlanningInfeasible;
  } catch (const gpform::NumericFailureError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumericFailure;
  } catch (const gpform::OutOfBoundsError& e) {
    std::fprintf(stderr, "out of bounds: %s\n", e.what());
    return kExitNumericFailure;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid scenario: %s\n", e.what());
    return kExitScenarioInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}

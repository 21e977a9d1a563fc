#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpform/environment.hpp"
#include "gpform/errors.hpp"
#include "gpform/export.hpp"
#include "gpform/factor_graph.hpp"
#include "gpform/gp_model.hpp"
#include "gpform/pipeline.hpp"
#include "gpform/polynomial.hpp"
#include "gpform/replanner.hpp"
#include "gpform/scenario.hpp"
#include "gpform/task_assignment.hpp"

namespace py = pybind11;
using namespace gpform;

namespace {

AssignmentMatrix assignment_from_lists(const std::vector<std::vector<int>>& grid, int num_real) {
  const int rows = static_cast<int>(grid.size());
  const int cols = rows ? static_cast<int>(grid.front().size()) : 0;
  AssignmentMatrix a(rows, cols, num_real);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(grid[r].size()) != cols)
      throw std::invalid_argument("assignment rows must have equal length");
    for (int c = 0; c < cols; ++c) a.at(r, c) = grid[r][c];
  }
  a.validate();
  return a;
}

std::vector<std::vector<int>> assignment_to_lists(const AssignmentMatrix& a) {
  std::vector<std::vector<int>> out(a.rows, std::vector<int>(a.cols));
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) out[r][c] = a.is_virtual(a.at(r, c)) ? -1 : a.at(r, c);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Formation trajectory generation over sparse GP factor graphs";

  py::register_exception<PlanningInfeasibleError>(m, "PlanningInfeasible");
  py::register_exception<NumericFailureError>(m, "NumericFailure");
  py::register_exception<OutOfBoundsError>(m, "OutOfBounds");

  // GP model primitives.
  m.def("transition", &transition, py::arg("dt"), py::arg("num_robots"),
        "Constant-velocity state transition matrix (4N x 4N)");
  m.def("gp_cov", &gp_cov, py::arg("dt"), py::arg("qc_scale"), py::arg("num_robots"),
        "Process-noise covariance of the constant-velocity prior");
  m.def("gp_cov_inverse", &gp_cov_inverse, py::arg("dt"), py::arg("qc_scale"),
        py::arg("num_robots"));
  m.def(
      "interpolate_state",
      [](double t0, const Eigen::Matrix2Xd& p0, const Eigen::Matrix2Xd& v0, double t1,
         const Eigen::Matrix2Xd& p1, const Eigen::Matrix2Xd& v1, double tau, double qc) {
        const Interpolation it =
            interpolate(SupportState(t0, p0, v0), SupportState(t1, p1, v1), tau, qc);
        return py::make_tuple(it.state.positions, it.state.velocities, it.lambda, it.psi);
      },
      py::arg("t0"), py::arg("pos0"), py::arg("vel0"), py::arg("t1"), py::arg("pos1"),
      py::arg("vel1"), py::arg("tau"), py::arg("qc_scale") = 1.0,
      "GP interpolation between two support states; returns (pos, vel, Lambda, Psi)");

  // Environment.
  py::class_<SignedDistanceGrid, std::shared_ptr<SignedDistanceGrid>>(m, "SignedDistanceGrid")
      .def_readonly("cell_size", &SignedDistanceGrid::cell_size)
      .def_readonly("width", &SignedDistanceGrid::width)
      .def_readonly("height", &SignedDistanceGrid::height)
      .def("query", [](const SignedDistanceGrid& sdf, double x, double y) {
        const DistanceQuery q = query_distance(sdf, {x, y});
        return py::make_tuple(q.distance, q.gradient);
      });
  m.def(
      "sdf_from_ascii",
      [](const std::vector<std::string>& rows, double cell_size, double inflation) {
        Scenario sc;
        sc.ascii_rows = rows;
        sc.cell_size = cell_size;
        OccupancyGrid g = build_occupancy(sc);
        if (inflation > 0.0) g = inflate(g, inflation);
        return std::make_shared<SignedDistanceGrid>(build_sdf(g));
      },
      py::arg("rows"), py::arg("cell_size") = 0.05, py::arg("inflation") = 0.0,
      "Signed distance field of an ascii map ('.' free, '#' occupied)");

  // Task assignment.
  m.def(
      "assign_transition",
      [](const std::vector<std::vector<int>>& old_grid, int num_real, int new_rows, int new_cols) {
        return assignment_to_lists(
            assign_transition(assignment_from_lists(old_grid, num_real), new_rows, new_cols));
      },
      py::arg("old_assignment"), py::arg("num_real"), py::arg("new_rows"), py::arg("new_cols"),
      "Diagonal-cut formation transition; virtual slots come back as -1");

  // Scenario and pipeline.
  py::class_<Scenario>(m, "Scenario")
      .def_readonly("num_robots", &Scenario::num_robots)
      .def_readonly("d0", &Scenario::d0)
      .def_readonly("total_time", &Scenario::total_time)
      .def_readonly("tau", &Scenario::tau);
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"));

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("initial_cost", &SolveReport::initial_cost)
      .def_readonly("final_cost", &SolveReport::final_cost)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("cost_trace", &SolveReport::cost_trace)
      .def_readonly("wall_time", &SolveReport::wall_time);

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("report", &PipelineResult::report)
      .def_property_readonly("sdf", [](const PipelineResult& r) { return r.sdf; })
      .def_property_readonly("num_robots",
                             [](const PipelineResult& r) { return r.scenario.num_robots; })
      .def("formations",
           [](const PipelineResult& r) {
             std::vector<std::pair<int, int>> out;
             for (const auto& e : r.plan.entries)
               out.emplace_back(e.formation.rows, e.formation.cols);
             return out;
           })
      .def("holds",
           [](const PipelineResult& r) {
             std::vector<std::pair<double, double>> out;
             for (const auto& e : r.plan.entries) out.emplace_back(e.hold.t_start, e.hold.t_end);
             return out;
           })
      .def("assignments",
           [](const PipelineResult& r) {
             std::vector<std::vector<std::vector<int>>> out;
             for (const auto& e : r.plan.entries)
               out.push_back(assignment_to_lists(e.formation.assignment));
             return out;
           })
      .def("sample",
           [](const PipelineResult& r, double t) {
             const SupportState s = sample_state(r.graph, r.solution, t);
             return py::make_tuple(s.positions, s.velocities);
           })
      .def("metrics",
           [](const PipelineResult& r, int samples) {
             const Metrics mx = compute_metrics(r, sample_uniform(r.graph, r.solution, samples));
             py::dict d;
             d["min_pairwise_distance"] = mx.min_pairwise_distance;
             d["min_obstacle_distance"] = mx.min_obstacle_distance;
             d["max_formation_error"] = mx.max_formation_error;
             return d;
           },
           py::arg("samples") = 100)
      .def("stage_times_ms",
           [](const PipelineResult& r) {
             py::dict d;
             d["formation_planning"] = r.stages.formation_planning_ms;
             d["task_assignment"] = r.stages.task_assignment_ms;
             d["trajectory_optimization"] = r.stages.trajectory_optimization_ms;
             d["total"] = r.stages.total_ms();
             return d;
           })
      .def("export_to", [](const PipelineResult& r, const std::string& dir, bool poly) {
        ExportOptions opts;
        opts.with_polynomials = poly;
        export_result(r, dir, opts);
      }, py::arg("directory"), py::arg("with_polynomials") = false);

  m.def("run_pipeline", &run_pipeline, py::arg("scenario"),
        "Plan formations, assign slots, optimize the GP factor graph");

  // Replanning.
  py::class_<PlanSession>(m, "PlanSession")
      .def_static("from_pipeline", &PlanSession::from_pipeline)
      .def_property_readonly("iterations",
                             [](const PlanSession& s) { return s.history.back().iterations; })
      .def("sample", [](const PlanSession& s, double t) {
        const SupportState st = sample_state(s.graph, s.solution, t);
        return py::make_tuple(st.positions, st.velocities);
      });
  m.def(
      "replan_goal",
      [](const PlanSession& session, double gx, double gy, double change_time, bool warm) {
        return replan_goal(session, {gx, gy}, change_time, {warm});
      },
      py::arg("session"), py::arg("goal_x"), py::arg("goal_y"), py::arg("change_time"),
      py::arg("warm_start") = true);
}

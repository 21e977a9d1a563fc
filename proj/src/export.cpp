#include "gpform/export.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpform {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<Sample> export_samples(const PipelineResult& result, double sample_dt) {
  const double horizon = result.graph.support_times.back() - result.graph.support_times.front();
  const int count = static_cast<int>(std::round(horizon / sample_dt)) + 1;
  return sample_uniform(result.graph, result.solution, count);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export: cannot write " + path);
  out << content;
}

}  // namespace

std::string format_assignment(const AssignmentMatrix& assignment) {
  std::ostringstream out;
  for (int r = 0; r < assignment.rows; ++r) {
    for (int c = 0; c < assignment.cols; ++c) {
      const int id = assignment.at(r, c);
      if (c) out << ' ';
      out << (assignment.is_virtual(id) ? -1 : id);
    }
    out << '\n';
  }
  return out.str();
}

std::string format_samples_csv(const PipelineResult& result, double sample_dt) {
  const auto samples = export_samples(result, sample_dt);
  std::ostringstream out;
  out << "t,robot,x,y,vx,vy\n";
  for (const Sample& s : samples) {
    for (int i = 0; i < s.positions.cols(); ++i) {
      out << fixed6(s.t) << ',' << i << ',' << fixed6(s.positions(0, i)) << ','
          << fixed6(s.positions(1, i)) << ',' << fixed6(s.velocities(0, i)) << ','
          << fixed6(s.velocities(1, i)) << '\n';
    }
  }
  return out.str();
}

std::string format_metrics(const PipelineResult& result, double sample_dt) {
  const auto samples = export_samples(result, sample_dt);
  const Metrics m = compute_metrics(result, samples);
  std::ostringstream out;
  out << "samples = " << samples.size() << "\n";
  out << "min_pairwise_distance = " << fixed6(m.min_pairwise_distance) << "\n";
  out << "min_obstacle_distance = " << fixed6(m.min_obstacle_distance) << "\n";
  for (size_t h = 0; h < m.max_formation_error.size(); ++h) {
    const auto& e = result.plan.entries[h];
    out << "max_formation_error[" << h << "] = " << fixed6(m.max_formation_error[h]) << "  # "
        << e.formation.rows << "x" << e.formation.cols << " hold [" << fixed6(e.hold.t_start)
        << ", " << fixed6(e.hold.t_end) << "]\n";
  }
  out << "initial_cost = " << fixed6(result.report.initial_cost) << "\n";
  out << "final_cost = " << fixed6(result.report.final_cost) << "\n";
  out << "accepted_iterations = " << result.report.iterations << "\n";
  out << "converged = " << (result.report.converged ? 1 : 0) << "\n";
  return out.str();
}

std::string format_plan_report(const PipelineResult& result) {
  std::ostringstream out;
  out << "robots = " << result.scenario.num_robots << "\n";
  out << "entries = " << result.plan.entries.size() << "\n";
  for (size_t i = 0; i < result.plan.entries.size(); ++i) {
    const auto& e = result.plan.entries[i];
    out << "formation " << i << ": " << e.formation.rows << "x" << e.formation.cols
        << " spacing=" << fixed6(e.formation.spacing) << " heading=" << fixed6(e.formation.heading)
        << " hold=[" << fixed6(e.hold.t_start) << ", " << fixed6(e.hold.t_end) << "]"
        << " corridor_halfwidth=" << fixed6(e.corridor.half_width) << "\n";
    out << "assignment " << i << ":\n" << format_assignment(e.formation.assignment);
  }
  out << "updated_path =";
  for (const Vec2& p : result.plan.updated_path.points)
    out << " (" << fixed6(p.x()) << ", " << fixed6(p.y()) << ")";
  out << "\n";
  return out.str();
}

std::string format_timing(const StageTimes& stages, const SolveReport& report) {
  std::ostringstream out;
  out << "stage_ms formation_planning = " << stages.formation_planning_ms << "\n";
  out << "stage_ms task_assignment = " << stages.task_assignment_ms << "\n";
  out << "stage_ms trajectory_optimization = " << stages.trajectory_optimization_ms << "\n";
  out << "stage_ms total = " << stages.total_ms() << "\n";
  out << "map_preparation_ms = " << stages.map_preparation_ms << "\n";
  out << "solver_wall_time_s = " << report.wall_time << "\n";
  out << "solver_accepted_iterations = " << report.iterations << "\n";
  return out.str();
}

std::string format_svg(const PipelineResult& result, double sample_dt) {
  const auto samples = export_samples(result, sample_dt);
  const OccupancyGrid& g = result.occupancy;
  const double scale = 100.0;  // 1 m = 100 px
  const double w = g.width * g.cell_size * scale;
  const double h = g.height * g.cell_size * scale;
  auto px = [&](const Vec2& p) {
    return Vec2((p.x() - g.origin.x()) * scale, h - (p.y() - g.origin.y()) * scale);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed6(w) << "\" height=\""
      << fixed6(h) << "\" viewBox=\"0 0 " << fixed6(w) << ' ' << fixed6(h) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Obstacles as cell squares (raw map, not the inflated one).
  out << "<g fill=\"#777777\" stroke=\"none\">\n";
  const double cs = g.cell_size * scale;
  for (int iy = 0; iy < g.height; ++iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      if (!g.occupied(ix, iy)) continue;
      const Vec2 c = px(g.cell_center(ix, iy));
      out << "<rect x=\"" << fixed6(c.x() - cs / 2) << "\" y=\"" << fixed6(c.y() - cs / 2)
          << "\" width=\"" << fixed6(cs) << "\" height=\"" << fixed6(cs) << "\"/>\n";
    }
  }
  out << "</g>\n";

  // Corridors.
  out << "<g fill=\"none\" stroke=\"#2a9d2a\" stroke-width=\"2\" stroke-dasharray=\"6 4\">\n";
  for (const auto& e : result.plan.entries) {
    const OrientedRect r = e.corridor.rect();
    const double ch = std::cos(r.heading), sh = std::sin(r.heading);
    const Vec2 ex(ch * r.half_length, sh * r.half_length);
    const Vec2 ey(-sh * r.half_width, ch * r.half_width);
    const Vec2 c0 = px(r.center - ex - ey), c1 = px(r.center + ex - ey);
    const Vec2 c2 = px(r.center + ex + ey), c3 = px(r.center - ex + ey);
    out << "<polygon points=\"" << fixed6(c0.x()) << ',' << fixed6(c0.y()) << ' ' << fixed6(c1.x())
        << ',' << fixed6(c1.y()) << ' ' << fixed6(c2.x()) << ',' << fixed6(c2.y()) << ' '
        << fixed6(c3.x()) << ',' << fixed6(c3.y()) << "\"/>\n";
  }
  out << "</g>\n";

  // One polyline per robot.
  static const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const int n = result.scenario.num_robots;
  for (int i = 0; i < n; ++i) {
    out << "<polyline fill=\"none\" stroke=\"" << kColors[i % 10] << "\" stroke-width=\"2\" points=\"";
    for (size_t s = 0; s < samples.size(); ++s) {
      const Vec2 p = px(samples[s].positions.col(i));
      if (s) out << ' ';
      out << fixed6(p.x()) << ',' << fixed6(p.y());
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string format_polynomials(const PipelineResult& result) {
  std::vector<std::pair<double, double>> holds;
  for (const auto& e : result.plan.entries) holds.emplace_back(e.hold.t_start, e.hold.t_end);
  const auto boundaries = polynomial_boundaries(result.graph.support_times, holds);
  const PiecewisePolynomial poly = fit_polynomials(result.graph, result.solution, boundaries);

  // Coefficients are emitted in local segment time u = t - t0, ascending
  // power, x row then y row.
  std::ostringstream out;
  out.precision(15);
  out << "degree = 7\n";
  out << "robots = " << poly.robots.size() << "\n";
  out << "segments = " << (boundaries.size() - 1) << "\n";
  for (size_t robot = 0; robot < poly.robots.size(); ++robot) {
    for (const auto& seg : poly.robots[robot]) {
      const double d = seg.t1 - seg.t0;
      out << "robot " << robot << " segment " << fixed6(seg.t0) << ' ' << fixed6(seg.t1) << "\n";
      for (int axis = 0; axis < 2; ++axis) {
        double dp = 1.0;
        for (int i = 0; i < 8; ++i, dp *= d) {
          out << (i ? " " : "") << seg.coeffs(i, axis) / dp;
        }
        out << "\n";
      }
    }
  }
  return out.str();
}

void export_result(const PipelineResult& result, const std::string& directory,
                   const ExportOptions& options) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path dir(directory);
  write_file((dir / "samples.csv").string(), format_samples_csv(result, options.sample_dt));
  write_file((dir / "metrics.txt").string(), format_metrics(result, options.sample_dt));
  write_file((dir / "plan.txt").string(), format_plan_report(result));
  write_file((dir / "trajectory.svg").string(), format_svg(result, options.sample_dt));
  write_file((dir / "timing.txt").string(), format_timing(result.stages, result.report));
  if (options.with_polynomials)
    write_file((dir / "polynomials.txt").string(), format_polynomials(result));
}

}  // namespace gpform

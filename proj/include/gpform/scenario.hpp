#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpform/cost_factors.hpp"
#include "gpform/environment.hpp"
#include "gpform/factor_graph.hpp"
#include "gpform/global_planner.hpp"

namespace gpform {

/// Corridor map description: sections of given length/width strung along the
/// +x axis from the start anchor, walls everywhere beside them.
struct CorridorSection {
  double length = 0.0;
  double width = 0.0;
};

/// Mission description parsed from a scenario file. Omitted optional fields
/// take the stock defaults (d0 = 0.5 m, r = 0.3 m, tau = 2 s, T = 10 s,
/// 11 support states, Qc = I, eps_obs = eps_col = 0.2 m, eps_form = 0.01 m,
/// robot radius 0.05 m) with sigma weights keyed by robot count.
struct Scenario {
  int num_robots = 0;
  double d0 = 0.5;
  double inflation = 0.3;  // obstacle expansion thickness r
  double tau = 2.0;
  double total_time = 10.0;
  int num_support_states = 11;
  int n_ip = 4;
  double qc_scale = 1.0;
  HingeParams hinge;
  bool sigma_given = false;
  double robot_radius = 0.05;
  double cell_size = 0.05;
  double map_margin = 1.0;  // free padding around the described map
  Vec2 start = Vec2::Zero();
  std::optional<Vec2> goal;
  std::optional<Eigen::Matrix2Xd> start_positions;  // explicit per-robot starts
  std::optional<std::pair<int, int>> fixed_formation;  // rows x cols override
  LmConfig lm;

  // Exactly one map form is populated.
  std::vector<CorridorSection> corridor;
  struct Box {
    Vec2 lo, hi;
  };
  std::vector<Box> boxes;      // obstacle rectangles
  std::optional<Vec2> extent_lo, extent_hi;  // world bounds for box/grid maps
  std::vector<std::string> ascii_rows;       // '.' free, '#' occupied
  Vec2 grid_origin = Vec2::Zero();

  void validate() const;  // throws std::invalid_argument
  Vec2 goal_point() const;
};

/// Table-keyed sigma defaults (rows 4 / 6 / 10).
HingeParams default_hinge_for(int num_robots);

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Rasterize the scenario map (before inflation).
OccupancyGrid build_occupancy(const Scenario& scenario);

/// Width-change breakpoints of a corridor scenario, start -> goal.
PiecewisePath scenario_path(const Scenario& scenario);

}  // namespace gpform

#include <doctest.h>

#include <cmath>

#include "gpform/errors.hpp"
#include "gpform/global_planner.hpp"
#include "gpform/scenario.hpp"

using namespace gpform;

namespace {

// Straight corridor along +x centered on y = 0, open at both ends.
OccupancyGrid corridor_map(double length, double width, double margin = 1.0) {
  const double h = 0.05;
  const Vec2 lo(-margin, -width / 2 - margin);
  const Vec2 hi(length + margin, width / 2 + margin);
  OccupancyGrid g(lo, h, static_cast<int>(std::ceil((hi.x() - lo.x()) / h)),
                  static_cast<int>(std::ceil((hi.y() - lo.y()) / h)));
  g.fill_box(Vec2(0.0, width / 2), Vec2(length, hi.y()), true);
  g.fill_box(Vec2(0.0, lo.y()), Vec2(length, -width / 2), true);
  return g;
}

Scenario bundled(const char* name) {
  return load_scenario(std::string(GPFORM_SCENARIO_DIR) + "/" + name);
}

Corridor corridor_with_width(double half_width) {
  Corridor c;
  c.seg_start = Vec2(0, 0);
  c.seg_end = Vec2(2, 0);
  c.half_width = half_width;
  return c;
}

}  // namespace

TEST_CASE("construct_rsfc centers in symmetric free space at maximal width") {
  const OccupancyGrid inflated = inflate(corridor_map(4.0, 2.5), 0.3);
  const Corridor c = construct_rsfc(inflated, Vec2(0.5, 0), Vec2(3.5, 0), 6, 0.5);
  CHECK(c.lateral_offset == doctest::Approx(0.0));
  // 2.5 m corridor minus 0.3 m inflation, grid quantized from 1.25 downward.
  CHECK(c.half_width == doctest::Approx(0.95));
  CHECK(rect_is_free(inflated, c.rect()));
}

TEST_CASE("construct_rsfc translates away from a one-sided wall") {
  // Extra obstacle band hanging into the corridor from above.
  OccupancyGrid map = corridor_map(4.0, 2.5);
  map.fill_box(Vec2(0.0, 0.6), Vec2(4.0, 1.25), true);
  const OccupancyGrid inflated = inflate(map, 0.3);
  const Corridor c = construct_rsfc(inflated, Vec2(0.5, 0), Vec2(3.5, 0), 4, 0.5);
  CHECK(c.lateral_offset < 0.0);  // pushed below the intruding band
  CHECK(rect_is_free(inflated, c.rect()));

  // Brute-force oracle over every grid-quantized width and translation:
  // the emitted corridor has the maximal feasible width, and no smaller
  // offset works at that width.
  const double cell = inflated.cell_size;
  double best_hw = -1.0, best_off = 0.0;
  for (double hw = 1.5 / 2.0; hw >= 0.25 - 1e-12; hw -= cell) {
    bool found = false;
    const int max_steps = static_cast<int>(std::floor(hw / cell + 1e-9));
    for (int step = 0; step <= max_steps && !found; ++step) {
      for (const int sign : {+1, -1}) {
        if (step == 0 && sign < 0) continue;
        Corridor trial = c;
        trial.half_width = hw;
        trial.lateral_offset = sign * step * cell;
        if (rect_is_free(inflated, trial.rect())) {
          best_hw = hw;
          best_off = trial.lateral_offset;
          found = true;
          break;
        }
      }
    }
    if (found) break;
  }
  CHECK(c.half_width == doctest::Approx(best_hw));
  CHECK(c.lateral_offset == doctest::Approx(best_off));
}

TEST_CASE("construct_rsfc reports a fully blocked corridor as infeasible") {
  OccupancyGrid map = corridor_map(4.0, 2.5);
  map.fill_box(Vec2(1.8, -1.25), Vec2(2.2, 1.25), true);  // wall across
  const OccupancyGrid inflated = inflate(map, 0.3);
  CHECK_THROWS_AS(construct_rsfc(inflated, Vec2(0.5, 0), Vec2(3.5, 0), 4, 0.5),
                  PlanningInfeasibleError);
}

TEST_CASE("formation_from_corridor reproduces the reported configurations") {
  // Six robots, corridor widths 2.5 / 1.5 / 3.5 m after 0.3 m inflation.
  CHECK(formation_from_corridor(corridor_with_width(0.95), 6, 0.5).rows == 3);
  CHECK(formation_from_corridor(corridor_with_width(0.95), 6, 0.5).cols == 2);
  CHECK(formation_from_corridor(corridor_with_width(0.45), 6, 0.5).rows == 2);
  CHECK(formation_from_corridor(corridor_with_width(0.45), 6, 0.5).cols == 3);
  CHECK(formation_from_corridor(corridor_with_width(1.25), 6, 0.5).rows == 6);
  CHECK(formation_from_corridor(corridor_with_width(1.25), 6, 0.5).cols == 1);

  // Ten robots, widths 4 / 2 / 7 m.
  CHECK(formation_from_corridor(corridor_with_width(1.70), 10, 0.5).rows == 5);
  CHECK(formation_from_corridor(corridor_with_width(1.70), 10, 0.5).cols == 2);
  CHECK(formation_from_corridor(corridor_with_width(0.70), 10, 0.5).rows == 2);
  CHECK(formation_from_corridor(corridor_with_width(0.70), 10, 0.5).cols == 5);
  CHECK(formation_from_corridor(corridor_with_width(2.25), 10, 0.5).rows == 10);
  CHECK(formation_from_corridor(corridor_with_width(2.25), 10, 0.5).cols == 1);
}

TEST_CASE("formation_from_corridor pads with virtual robots when nothing divides") {
  // Seven robots in a corridor that fits four per column: 4x2 with one
  // virtual slot.
  const FormationSpec f = formation_from_corridor(corridor_with_width(0.95), 7, 0.5);
  CHECK(f.rows == 4);
  CHECK(f.cols == 2);

  const FormationSpec single = formation_from_corridor(corridor_with_width(0.95), 1, 0.5);
  CHECK(single.rows == 1);
  CHECK(single.cols == 1);
}

TEST_CASE("formation extent always fits the corridor") {
  for (double hw : {0.25, 0.45, 0.7, 0.95, 1.25, 1.7, 2.25}) {
    for (int n : {1, 2, 4, 6, 7, 10}) {
      const FormationSpec f = formation_from_corridor(corridor_with_width(hw), n, 0.5);
      CHECK((f.rows - 1) * 0.5 <= 2 * hw + 1e-9);
      CHECK(f.rows * f.cols >= n);
    }
  }
}

TEST_CASE("update_path shifts breakpoints into the wider corridor") {
  // Bundled six-robot geometry: sections 1.55 / 1.9 / 1.55 m.
  PiecewisePath path;
  path.points = {Vec2(0, 0), Vec2(1.55, 0), Vec2(3.45, 0), Vec2(5.0, 0)};
  std::vector<Corridor> corridors;
  std::vector<FormationSpec> formations;
  for (const auto& [hw, rows, cols] :
       std::vector<std::tuple<double, int, int>>{{0.95, 3, 2}, {0.45, 2, 3}, {1.25, 6, 1}}) {
    Corridor c = corridor_with_width(hw);
    corridors.push_back(c);
    FormationSpec f;
    f.rows = rows;
    f.cols = cols;
    f.spacing = 0.5;
    formations.push_back(f);
  }
  const PiecewisePath updated = update_path(path, formations, corridors, 0.5, 0.05);
  // Narrow formation 2x3 extends (3-1)*0.5 = 1 m along track: breakpoints
  // move half of that plus one cell into the wider neighbors.
  CHECK(updated.points[1].x() == doctest::Approx(1.0));
  CHECK(updated.points[2].x() == doctest::Approx(4.0));
  CHECK(updated.points[0].x() == doctest::Approx(0.0));
  CHECK(updated.points[3].x() == doctest::Approx(5.0));

  // Larger narrow-formation extent never shrinks the shift.
  formations[1].cols = 5;
  const PiecewisePath wider = update_path(path, formations, corridors, 0.5, 0.05);
  CHECK(wider.points[1].x() <= updated.points[1].x() + 1e-12);
  CHECK(wider.points[2].x() >= updated.points[2].x() - 1e-12);
}

TEST_CASE("update_path rejects shifts that consume a whole segment") {
  PiecewisePath path;
  path.points = {Vec2(0, 0), Vec2(0.4, 0), Vec2(3.0, 0)};
  std::vector<Corridor> corridors{corridor_with_width(0.95), corridor_with_width(0.45)};
  std::vector<FormationSpec> formations(2);
  formations[0].rows = 3;
  formations[0].cols = 2;
  formations[1].rows = 2;
  formations[1].cols = 3;  // shift 0.55 into the 0.4 m first segment
  CHECK_THROWS_AS(update_path(path, formations, corridors, 0.5, 0.05), PlanningInfeasibleError);
}

TEST_CASE("allocate_times reproduces the bundled schedule") {
  PiecewisePath updated;
  updated.points = {Vec2(0, 0), Vec2(1.0, 0), Vec2(4.0, 0), Vec2(5.0, 0)};  // lengths 1:3:1
  const auto holds = allocate_times(updated, 2.0, 10.0);
  REQUIRE(holds.size() == 3);
  CHECK(holds[0].t_start == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(holds[0].t_end == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(holds[1].t_start == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(holds[1].t_end == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(holds[2].t_start == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(holds[2].t_end == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("allocate_times with a single segment holds from tau/2 to the horizon") {
  PiecewisePath updated;
  updated.points = {Vec2(0, 0), Vec2(6.0, 0)};
  const auto holds = allocate_times(updated, 2.0, 10.0);
  REQUIRE(holds.size() == 1);
  CHECK(holds[0].t_start == doctest::Approx(1.0));
  CHECK(holds[0].t_end == doctest::Approx(10.0));
}

TEST_CASE("allocate_times telescopes exactly") {
  PiecewisePath updated;
  updated.points = {Vec2(0, 0), Vec2(0.7, 0), Vec2(1.9, 0), Vec2(2.3, 0), Vec2(4.1, 0)};
  const double tau = 1.3, total = 12.0;
  const auto holds = allocate_times(updated, tau, total);
  CHECK(holds.front().t_start == doctest::Approx(tau / 2));
  for (size_t i = 1; i < holds.size(); ++i)
    CHECK(holds[i].t_start - holds[i - 1].t_end == doctest::Approx(tau));
  CHECK(holds.back().t_end == doctest::Approx(total));
  double sum = 0.0;
  for (const auto& h : holds) sum += h.t_end - h.t_start;
  CHECK(sum + tau / 2 + (holds.size() - 1) * tau == doctest::Approx(total));

  CHECK_THROWS_AS(allocate_times(updated, 4.0, 10.0), PlanningInfeasibleError);
}

TEST_CASE("plan_formations runs the full pass on the bundled six-robot map") {
  const Scenario sc = bundled("corridor6.txt");
  const OccupancyGrid inflated = inflate(build_occupancy(sc), sc.inflation);
  const FormationPlan plan = plan_formations(inflated, scenario_path(sc), sc.num_robots, sc.d0,
                                             sc.tau, sc.total_time, nullptr, sc.inflation);
  REQUIRE(plan.entries.size() == 3);
  CHECK(plan.entries[0].formation.rows == 3);
  CHECK(plan.entries[0].formation.cols == 2);
  CHECK(plan.entries[1].formation.rows == 2);
  CHECK(plan.entries[1].formation.cols == 3);
  CHECK(plan.entries[2].formation.rows == 6);
  CHECK(plan.entries[2].formation.cols == 1);
  CHECK(plan.entries[0].hold.t_start == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(plan.entries[2].hold.t_end == doctest::Approx(10.0).epsilon(1e-9));

  for (const auto& e : plan.entries) {
    CHECK(rect_is_free(inflated, e.corridor.rect()));
    CHECK((e.formation.rows - 1) * sc.d0 <= 2 * e.corridor.half_width + 1e-9);
  }

  // Deterministic: a second pass gives the identical plan.
  const FormationPlan again = plan_formations(inflated, scenario_path(sc), sc.num_robots, sc.d0,
                                              sc.tau, sc.total_time, nullptr, sc.inflation);
  for (size_t i = 0; i < plan.entries.size(); ++i) {
    CHECK(again.entries[i].formation.rows == plan.entries[i].formation.rows);
    CHECK(again.entries[i].corridor.half_width == plan.entries[i].corridor.half_width);
    CHECK(again.entries[i].hold.t_start == plan.entries[i].hold.t_start);
  }
}

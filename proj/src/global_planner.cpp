#include "gpform/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpform/errors.hpp"

namespace gpform {

double PiecewisePath::total_length() const {
  double sum = 0.0;
  for (int i = 0; i < num_segments(); ++i) sum += segment_length(i);
  return sum;
}

void PiecewisePath::validate() const {
  if (points.size() < 2) throw std::invalid_argument("path needs at least two points");
  for (size_t i = 1; i < points.size(); ++i)
    if ((points[i] - points[i - 1]).norm() < 1e-12)
      throw std::invalid_argument("path has coincident consecutive points");
}

OrientedRect Corridor::rect() const {
  const Vec2 dir = (seg_end - seg_start).normalized();
  const Vec2 normal(-dir.y(), dir.x());
  OrientedRect r;
  r.center = 0.5 * (seg_start + seg_end) + lateral_offset * normal;
  r.half_length = 0.5 * length();
  r.half_width = half_width;
  r.heading = heading;
  return r;
}

Corridor construct_rsfc(const OccupancyGrid& inflated_map, const Vec2& seg_start,
                        const Vec2& seg_end, int num_robots, double d0) {
  if (num_robots < 1) throw std::invalid_argument("construct_rsfc: need at least one robot");
  if (d0 <= 0.0) throw std::invalid_argument("construct_rsfc: d0 must be positive");

  const double seg_len = (seg_end - seg_start).norm();
  if (seg_len < 1e-12) throw std::invalid_argument("construct_rsfc: degenerate segment");
  const double cell = inflated_map.cell_size;
  const double min_hw = d0 / 2.0;
  const double init_hw = std::max((num_robots - 1) * d0 / 2.0, min_hw);

  Corridor c;
  c.seg_start = seg_start;
  c.seg_end = seg_end;
  c.heading = std::atan2(seg_end.y() - seg_start.y(), seg_end.x() - seg_start.x());

  // One pass over the bounding band collects the lateral coordinate of every
  // occupied cell beside the segment; each (width, offset) trial is then an
  // interval-emptiness query on the sorted list instead of a full rectangle
  // scan. The winning candidate is still confirmed with rect_is_free.
  std::vector<double> lateral;
  {
    const Vec2 mid = 0.5 * (seg_start + seg_end);
    const double ch = std::cos(c.heading), sh = std::sin(c.heading);
    const double hl = seg_len / 2.0;
    const double ex = std::abs(ch) * hl + std::abs(sh) * init_hw + cell;
    const double ey = std::abs(sh) * hl + std::abs(ch) * init_hw + cell;
    const auto [ix0, iy0] = inflated_map.cell_of(mid - Vec2(ex, ey));
    const auto [ix1, iy1] = inflated_map.cell_of(mid + Vec2(ex, ey));
    for (int iy = std::max(iy0 - 1, 0); iy <= std::min(iy1 + 1, inflated_map.height - 1); ++iy) {
      for (int ix = std::max(ix0 - 1, 0); ix <= std::min(ix1 + 1, inflated_map.width - 1); ++ix) {
        if (!inflated_map.occupied(ix, iy)) continue;
        const Vec2 d = inflated_map.cell_center(ix, iy) - mid;
        const double u = ch * d.x() + sh * d.y();
        if (std::abs(u) > hl) continue;
        lateral.push_back(-sh * d.x() + ch * d.y());
      }
    }
    std::sort(lateral.begin(), lateral.end());
  }
  const auto band_blocked = [&](double off, double hw) {
    const auto it = std::lower_bound(lateral.begin(), lateral.end(), off - hw);
    return it != lateral.end() && *it <= off + hw;
  };

  for (double hw = init_hw; hw >= min_hw - 1e-12; hw -= cell) {
    // Offsets 0, +-cell, +-2 cell, ... while the rectangle still covers the
    // segment itself.
    const int max_steps = static_cast<int>(std::floor(hw / cell + 1e-9));
    for (int step = 0; step <= max_steps; ++step) {
      for (const int sign : {+1, -1}) {
        if (step == 0 && sign < 0) continue;
        c.lateral_offset = sign * step * cell;
        c.half_width = hw;
        if (band_blocked(c.lateral_offset, hw)) continue;
        if (rect_is_free(inflated_map, c.rect())) return c;
      }
    }
  }
  throw PlanningInfeasibleError("construct_rsfc: no free corridor around the segment");
}

FormationSpec formation_from_corridor(const Corridor& corridor, int num_robots, double d0) {
  if (d0 <= 0.0) throw std::invalid_argument("formation_from_corridor: d0 must be positive");
  const int k_fit =
      std::min(static_cast<int>(std::floor(2.0 * corridor.half_width / d0 + 1e-9)) + 1,
               num_robots);
  if (k_fit < 1)
    throw PlanningInfeasibleError("formation_from_corridor: corridor admits no robot column");

  int rows = 0;
  for (int d = 1; d <= k_fit; ++d)
    if (num_robots % d == 0) rows = d;
  if (rows <= 1 && k_fit > 1) rows = k_fit;  // no divisor fits: pad with virtual robots
  if (rows == 0) rows = 1;

  FormationSpec spec;
  spec.rows = rows;
  spec.cols = (num_robots + rows - 1) / rows;
  spec.spacing = d0;
  spec.heading = corridor.heading;
  return spec;
}

PiecewisePath update_path(const PiecewisePath& path, const std::vector<FormationSpec>& formations,
                          const std::vector<Corridor>& corridors, double d0, double cell_size) {
  path.validate();
  if (d0 <= 0.0) throw std::invalid_argument("update_path: d0 must be positive");
  const int m = path.num_segments();
  if (static_cast<int>(formations.size()) != m || static_cast<int>(corridors.size()) != m)
    throw std::invalid_argument("update_path: one formation and corridor per segment required");

  PiecewisePath out = path;
  for (int i = 1; i < m; ++i) {  // interior breakpoints only
    const double w_prev = corridors[i - 1].half_width;
    const double w_next = corridors[i].half_width;
    if (std::abs(w_prev - w_next) < 0.5 * cell_size) continue;  // no width change

    const bool prev_wider = w_prev > w_next;
    const FormationSpec& narrow_form = prev_wider ? formations[i] : formations[i - 1];
    const double shift = 0.5 * narrow_form.length() + cell_size;
    if (shift <= 0.0) continue;

    const Vec2 dir_prev = (path.points[i] - path.points[i - 1]).normalized();
    const Vec2 dir_next = (path.points[i + 1] - path.points[i]).normalized();
    if (prev_wider) {
      if (shift >= (path.points[i] - path.points[i - 1]).norm())
        throw PlanningInfeasibleError("update_path: breakpoint shift exceeds segment length");
      out.points[i] = path.points[i] - shift * dir_prev;
    } else {
      if (shift >= (path.points[i + 1] - path.points[i]).norm())
        throw PlanningInfeasibleError("update_path: breakpoint shift exceeds segment length");
      out.points[i] = path.points[i] + shift * dir_next;
    }
  }
  out.validate();
  return out;
}

std::vector<HoldInterval> allocate_times(const PiecewisePath& updated_path, double tau,
                                         double total_time) {
  updated_path.validate();
  if (tau < 0.0) throw std::invalid_argument("allocate_times: tau must be non-negative");
  const int m = updated_path.num_segments();
  if (!(total_time > (m - 1) * tau + tau / 2.0))
    throw PlanningInfeasibleError("allocate_times: horizon too short for the transition gaps");

  const double budget = total_time - tau / 2.0 - (m - 1) * tau;
  const double total_len = updated_path.total_length();

  std::vector<HoldInterval> holds(m);
  double t = tau / 2.0;
  for (int i = 0; i < m; ++i) {
    const double duration = budget * updated_path.segment_length(i) / total_len;
    holds[i].t_start = t;
    holds[i].t_end = t + duration;
    t = holds[i].t_end + tau;
  }
  holds.back().t_end = total_time;  // absorb rounding in the last window
  return holds;
}

FormationPlan plan_formations(const OccupancyGrid& inflated_map, const PiecewisePath& path,
                              int num_robots, double d0, double tau, double total_time,
                              const FormationSpec* fixed_formation, double corner_margin) {
  path.validate();
  if (corner_margin < 0.0) throw std::invalid_argument("plan_formations: negative corner margin");
  const int m = path.num_segments();

  std::vector<Corridor> corridors;
  std::vector<FormationSpec> formations;
  corridors.reserve(m);
  formations.reserve(m);
  for (int i = 0; i < m; ++i) {
    const Vec2 dir = (path.points[i + 1] - path.points[i]).normalized();
    Vec2 a = path.points[i];
    Vec2 b = path.points[i + 1];
    if (i > 0) a += corner_margin * dir;
    if (i + 1 < m) b -= corner_margin * dir;
    if ((b - a).dot(dir) <= 0.0)
      throw PlanningInfeasibleError("plan_formations: segment shorter than its corner margins");
    Corridor c = construct_rsfc(inflated_map, a, b, num_robots, d0);
    FormationSpec f;
    if (fixed_formation) {
      f = *fixed_formation;
      f.spacing = d0;
      f.heading = c.heading;
      if ((f.rows - 1) * d0 > 2.0 * c.half_width + 1e-9)
        throw PlanningInfeasibleError("plan_formations: prescribed formation wider than corridor");
    } else {
      f = formation_from_corridor(c, num_robots, d0);
    }
    corridors.push_back(std::move(c));
    formations.push_back(std::move(f));
  }

  FormationPlan plan;
  plan.tau = tau;
  plan.total_time = total_time;
  plan.updated_path = update_path(path, formations, corridors, d0, inflated_map.cell_size);
  const std::vector<HoldInterval> holds = allocate_times(plan.updated_path, tau, total_time);

  plan.entries.resize(m);
  for (int i = 0; i < m; ++i) {
    plan.entries[i].formation = formations[i];
    plan.entries[i].hold = holds[i];
    plan.entries[i].corridor = corridors[i];
  }
  return plan;
}

}  // namespace gpform

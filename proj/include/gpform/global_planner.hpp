#pragma once

#include <vector>

#include "gpform/environment.hpp"
#include "gpform/formation.hpp"

namespace gpform {

/// Piecewise linear path through free space; every consecutive pair of
/// points is a corridor segment.
struct PiecewisePath {
  std::vector<Vec2> points;

  int num_segments() const { return static_cast<int>(points.size()) - 1; }
  double segment_length(int i) const { return (points[i + 1] - points[i]).norm(); }
  double total_length() const;
  void validate() const;
};

/// Rectangular safe flight corridor around one path segment. The rectangle
/// is the segment swept half_width to both sides, possibly after a lateral
/// translation of the center line.
struct Corridor {
  Vec2 seg_start = Vec2::Zero();
  Vec2 seg_end = Vec2::Zero();
  double half_width = 0.0;
  double lateral_offset = 0.0;  // translation along the left normal
  double heading = 0.0;

  OrientedRect rect() const;
  double length() const { return (seg_end - seg_start).norm(); }
};

struct HoldInterval {
  double t_start = 0.0;
  double t_end = 0.0;
};

/// Output of the global planner: one formation per corridor with its
/// execution window.
struct FormationPlan {
  struct Entry {
    FormationSpec formation;  // assignment filled in by the task-assignment pass
    HoldInterval hold;
    Corridor corridor;
  };
  std::vector<Entry> entries;
  double tau = 2.0;
  double total_time = 10.0;
  PiecewisePath updated_path;
};

/// Fit a free rectangle of maximal width around the segment: start from the
/// width the full team would need, translate perpendicular to the segment in
/// cell steps (both directions, growing offset), and shrink the half width
/// one cell at a time until rect_is_free holds. Throws
/// PlanningInfeasibleError when no rectangle of half width >= d0/2 exists.
Corridor construct_rsfc(const OccupancyGrid& inflated_map, const Vec2& seg_start,
                        const Vec2& seg_end, int num_robots, double d0);

/// Rows = robots per column across the corridor: the largest divisor of N
/// that fits, otherwise the full fitting count with virtual padding.
FormationSpec formation_from_corridor(const Corridor& corridor, int num_robots, double d0);

/// Move each interior breakpoint into the wider adjacent corridor by half
/// the along-track extent of the narrower segment's formation plus one map
/// cell, so transitions happen in the roomy part.
PiecewisePath update_path(const PiecewisePath& path, const std::vector<FormationSpec>& formations,
                          const std::vector<Corridor>& corridors, double d0, double cell_size);

/// Length-proportional hold windows: tau/2 lead-in, tau transition gaps,
/// last window ending exactly at total_time.
std::vector<HoldInterval> allocate_times(const PiecewisePath& updated_path, double tau,
                                         double total_time);

/// Full formation-planning pass over a path in an inflated map. When
/// `fixed_formation` is non-null its dims override formation_from_corridor
/// for every segment (prescribed-formation missions). Interior segment ends
/// are pulled back by `corner_margin` before corridor construction so the
/// inflated corner of an adjacent narrower section does not clip the
/// corridor width; the transition itself happens in that pulled-back zone.
FormationPlan plan_formations(const OccupancyGrid& inflated_map, const PiecewisePath& path,
                              int num_robots, double d0, double tau, double total_time,
                              const FormationSpec* fixed_formation = nullptr,
                              double corner_margin = 0.0);

}  // namespace gpform

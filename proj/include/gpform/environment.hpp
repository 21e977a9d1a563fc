#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace gpform {

using Vec2 = Eigen::Vector2d;

/// Boolean occupancy over a regular grid. Cell (ix, iy) has its center at
/// origin + ((ix + 0.5) h, (iy + 0.5) h).
struct OccupancyGrid {
  Vec2 origin = Vec2::Zero();
  double cell_size = 0.05;
  int width = 0;
  int height = 0;
  std::vector<uint8_t> cells;  // row iy * width + ix, 1 = occupied

  OccupancyGrid() = default;
  OccupancyGrid(Vec2 origin_, double cell_size_, int width_, int height_);

  bool occupied(int ix, int iy) const { return cells[static_cast<size_t>(iy) * width + ix] != 0; }
  void set(int ix, int iy, bool occ) { cells[static_cast<size_t>(iy) * width + ix] = occ ? 1 : 0; }
  bool in_bounds(int ix, int iy) const { return ix >= 0 && ix < width && iy >= 0 && iy < height; }
  Vec2 cell_center(int ix, int iy) const {
    return origin + Vec2((ix + 0.5) * cell_size, (iy + 0.5) * cell_size);
  }
  /// Cell index containing a world point (no bounds check).
  std::pair<int, int> cell_of(const Vec2& p) const;

  /// Mark every cell whose center lies inside the world-frame axis-aligned
  /// box [lo, hi] as occupied.
  void fill_box(const Vec2& lo, const Vec2& hi, bool occ = true);
};

/// Signed distance to the nearest obstacle, negative inside obstacles,
/// sampled at cell centers and queried with bilinear interpolation.
struct SignedDistanceGrid {
  Vec2 origin = Vec2::Zero();
  double cell_size = 0.05;
  int width = 0;
  int height = 0;
  std::vector<double> values;  // meters, row-major like OccupancyGrid

  double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * width + ix]; }
  bool contains(const Vec2& p) const;
};

struct DistanceQuery {
  double distance = 0.0;  // meters, signed
  Vec2 gradient = Vec2::Zero();
};

/// Oriented rectangle: center, half extent along the heading axis,
/// half extent across it.
struct OrientedRect {
  Vec2 center = Vec2::Zero();
  double half_length = 0.0;
  double half_width = 0.0;
  double heading = 0.0;  // radians

  bool contains(const Vec2& p) const;
};

/// Dilate the occupied set: a cell becomes occupied iff its center lies
/// within `thickness` (Euclidean, center to center) of an originally
/// occupied cell.
OccupancyGrid inflate(const OccupancyGrid& grid, double thickness);

/// Exact Euclidean distance transform (two-pass lower-envelope method).
/// All-free grids get a large positive sentinel, all-occupied the negative
/// sentinel, both 10 * max(width, height) * cell_size.
SignedDistanceGrid build_sdf(const OccupancyGrid& grid);

/// Bilinear interpolation of the SDF with the analytic patch gradient.
/// Throws OutOfBoundsError if p lies outside the grid rectangle.
DistanceQuery query_distance(const SignedDistanceGrid& sdf, const Vec2& p);

/// True iff no occupied cell center lies inside the rectangle.
bool rect_is_free(const OccupancyGrid& grid, const OrientedRect& rect);

}  // namespace gpform

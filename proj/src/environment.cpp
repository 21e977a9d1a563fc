#include "gpform/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpform/errors.hpp"

namespace gpform {

OccupancyGrid::OccupancyGrid(Vec2 origin_, double cell_size_, int width_, int height_)
    : origin(origin_), cell_size(cell_size_), width(width_), height(height_) {
  if (cell_size <= 0.0) throw std::invalid_argument("cell_size must be positive");
  if (width < 1 || height < 1) throw std::invalid_argument("grid must be at least 1x1");
  cells.assign(static_cast<size_t>(width) * height, 0);
}

std::pair<int, int> OccupancyGrid::cell_of(const Vec2& p) const {
  const int ix = static_cast<int>(std::floor((p.x() - origin.x()) / cell_size));
  const int iy = static_cast<int>(std::floor((p.y() - origin.y()) / cell_size));
  return {ix, iy};
}

void OccupancyGrid::fill_box(const Vec2& lo, const Vec2& hi, bool occ) {
  for (int iy = 0; iy < height; ++iy) {
    for (int ix = 0; ix < width; ++ix) {
      const Vec2 c = cell_center(ix, iy);
      if (c.x() >= lo.x() && c.x() <= hi.x() && c.y() >= lo.y() && c.y() <= hi.y())
        set(ix, iy, occ);
    }
  }
}

bool SignedDistanceGrid::contains(const Vec2& p) const {
  return p.x() >= origin.x() && p.x() <= origin.x() + width * cell_size && p.y() >= origin.y() &&
         p.y() <= origin.y() + height * cell_size;
}

bool OrientedRect::contains(const Vec2& p) const {
  const double c = std::cos(heading), s = std::sin(heading);
  const Vec2 d = p - center;
  const double u = c * d.x() + s * d.y();
  const double v = -s * d.x() + c * d.y();
  return std::abs(u) <= half_length && std::abs(v) <= half_width;
}

OccupancyGrid inflate(const OccupancyGrid& grid, double thickness) {
  if (thickness < 0.0) throw std::invalid_argument("inflate: thickness must be non-negative");
  if (thickness == 0.0) return grid;

  const double h = grid.cell_size;
  const int reach = static_cast<int>(std::floor(thickness / h)) + 1;
  // Disk stencil of center-to-center offsets within the inflation radius.
  // The tolerance keeps cells at exactly the inflation radius inside the
  // stencil when rounding would otherwise drop them.
  std::vector<std::pair<int, int>> stencil;
  for (int dy = -reach; dy <= reach; ++dy)
    for (int dx = -reach; dx <= reach; ++dx)
      if ((dx * dx + dy * dy) * h * h <= thickness * thickness + 1e-12) stencil.emplace_back(dx, dy);

  OccupancyGrid out = grid;
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      if (!grid.occupied(ix, iy)) continue;
      for (const auto& [dx, dy] : stencil) {
        const int jx = ix + dx, jy = iy + dy;
        if (out.in_bounds(jx, jy)) out.set(jx, jy, true);
      }
    }
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared distance transform, Felzenszwalb & Huttenlocher lower envelope.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (f[v[0]] == kInf) {
      v[0] = q;
      continue;
    }
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (k > 0 && s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    if (f[v[0]] == kInf) {
      d[q] = kInf;
      continue;
    }
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

// Squared cell distances to the nearest seed cell (seed(sz) true), exact.
std::vector<double> edt_2d(const OccupancyGrid& g, const std::vector<uint8_t>& seed) {
  const int w = g.width, h = g.height;
  std::vector<double> dist(static_cast<size_t>(w) * h, kInf);

  // Pass 1: per column over rows.
  std::vector<double> f(std::max(w, h)), d(std::max(w, h));
  std::vector<int> v(std::max(w, h));
  std::vector<double> z(std::max(w, h) + 1);
  for (int ix = 0; ix < w; ++ix) {
    for (int iy = 0; iy < h; ++iy)
      f[iy] = seed[static_cast<size_t>(iy) * w + ix] ? 0.0 : kInf;
    f.resize(h);
    d.resize(h);
    edt_1d(f, d, v, z);
    for (int iy = 0; iy < h; ++iy) dist[static_cast<size_t>(iy) * w + ix] = d[iy];
    f.resize(std::max(w, h));
    d.resize(std::max(w, h));
  }
  // Pass 2: per row over columns.
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) f[ix] = dist[static_cast<size_t>(iy) * w + ix];
    f.resize(w);
    d.resize(w);
    edt_1d(f, d, v, z);
    for (int ix = 0; ix < w; ++ix) dist[static_cast<size_t>(iy) * w + ix] = d[ix];
    f.resize(std::max(w, h));
    d.resize(std::max(w, h));
  }
  return dist;
}

}  // namespace

SignedDistanceGrid build_sdf(const OccupancyGrid& grid) {
  if (grid.width < 1 || grid.height < 1) throw std::invalid_argument("build_sdf: empty grid");

  SignedDistanceGrid sdf;
  sdf.origin = grid.origin;
  sdf.cell_size = grid.cell_size;
  sdf.width = grid.width;
  sdf.height = grid.height;
  sdf.values.assign(static_cast<size_t>(grid.width) * grid.height, 0.0);

  const double sentinel = 10.0 * std::max(grid.width, grid.height) * grid.cell_size;
  const size_t n = sdf.values.size();

  bool any_occ = false, any_free = false;
  for (size_t i = 0; i < n; ++i) (grid.cells[i] ? any_occ : any_free) = true;

  if (!any_occ) {
    std::fill(sdf.values.begin(), sdf.values.end(), sentinel);
    return sdf;
  }
  if (!any_free) {
    std::fill(sdf.values.begin(), sdf.values.end(), -sentinel);
    return sdf;
  }

  std::vector<uint8_t> free_seed(n);
  for (size_t i = 0; i < n; ++i) free_seed[i] = grid.cells[i] ? 0 : 1;
  const std::vector<double> d2_occ = edt_2d(grid, grid.cells);
  const std::vector<double> d2_free = edt_2d(grid, free_seed);

  for (size_t i = 0; i < n; ++i) {
    sdf.values[i] = grid.cells[i] ? -std::sqrt(d2_free[i]) * grid.cell_size
                                  : std::sqrt(d2_occ[i]) * grid.cell_size;
  }
  return sdf;
}

DistanceQuery query_distance(const SignedDistanceGrid& sdf, const Vec2& p) {
  if (!sdf.contains(p))
    throw OutOfBoundsError("query_distance: point outside mapped workspace");

  const double h = sdf.cell_size;
  // Continuous index on the cell-center lattice.
  const double gx = (p.x() - sdf.origin.x()) / h - 0.5;
  const double gy = (p.y() - sdf.origin.y()) / h - 0.5;
  // Clamp the patch so border queries extrapolate the nearest bilinear facet.
  const int ix = std::clamp(static_cast<int>(std::floor(gx)), 0, std::max(sdf.width - 2, 0));
  const int iy = std::clamp(static_cast<int>(std::floor(gy)), 0, std::max(sdf.height - 2, 0));
  const double fx = gx - ix;
  const double fy = gy - iy;

  if (sdf.width == 1 && sdf.height == 1) return {sdf.at(0, 0), Vec2::Zero()};

  const int ix1 = std::min(ix + 1, sdf.width - 1);
  const int iy1 = std::min(iy + 1, sdf.height - 1);
  const double v00 = sdf.at(ix, iy);
  const double v10 = sdf.at(ix1, iy);
  const double v01 = sdf.at(ix, iy1);
  const double v11 = sdf.at(ix1, iy1);

  DistanceQuery q;
  q.distance = v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) + v01 * (1 - fx) * fy +
               v11 * fx * fy;
  q.gradient.x() = ((v10 - v00) * (1 - fy) + (v11 - v01) * fy) / h;
  q.gradient.y() = ((v01 - v00) * (1 - fx) + (v11 - v10) * fx) / h;
  return q;
}

bool rect_is_free(const OccupancyGrid& grid, const OrientedRect& rect) {
  // Scan only the axis-aligned bounding box of the rectangle.
  const double c = std::cos(rect.heading), s = std::sin(rect.heading);
  const double ex = std::abs(c) * rect.half_length + std::abs(s) * rect.half_width;
  const double ey = std::abs(s) * rect.half_length + std::abs(c) * rect.half_width;
  const Vec2 lo = rect.center - Vec2(ex, ey);
  const Vec2 hi = rect.center + Vec2(ex, ey);

  const auto [ix0, iy0] = grid.cell_of(lo);
  const auto [ix1, iy1] = grid.cell_of(hi);
  for (int iy = std::max(iy0 - 1, 0); iy <= std::min(iy1 + 1, grid.height - 1); ++iy) {
    for (int ix = std::max(ix0 - 1, 0); ix <= std::min(ix1 + 1, grid.width - 1); ++ix) {
      if (grid.occupied(ix, iy) && rect.contains(grid.cell_center(ix, iy))) return false;
    }
  }
  return true;
}

}  // namespace gpform

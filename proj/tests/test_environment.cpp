#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gpform/environment.hpp"
#include "gpform/errors.hpp"

using namespace gpform;

namespace {

// O(n^2) nearest-cell oracle, written against the same center-to-center
// distance expression so equality with the transform can be exact.
SignedDistanceGrid brute_force_sdf(const OccupancyGrid& g) {
  SignedDistanceGrid sdf;
  sdf.origin = g.origin;
  sdf.cell_size = g.cell_size;
  sdf.width = g.width;
  sdf.height = g.height;
  sdf.values.assign(static_cast<size_t>(g.width) * g.height, 0.0);

  const double sentinel = 10.0 * std::max(g.width, g.height) * g.cell_size;
  bool any_occ = false, any_free = false;
  for (uint8_t c : g.cells) (c ? any_occ : any_free) = true;
  if (!any_occ || !any_free) {
    std::fill(sdf.values.begin(), sdf.values.end(), any_occ ? -sentinel : sentinel);
    return sdf;
  }

  for (int iy = 0; iy < g.height; ++iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      const bool occ = g.occupied(ix, iy);
      double best = std::numeric_limits<double>::infinity();
      for (int jy = 0; jy < g.height; ++jy) {
        for (int jx = 0; jx < g.width; ++jx) {
          if (g.occupied(jx, jy) == occ) continue;
          const double d2 = double((ix - jx) * (ix - jx) + (iy - jy) * (iy - jy));
          best = std::min(best, d2);
        }
      }
      const double dist = std::sqrt(best) * g.cell_size;
      sdf.values[static_cast<size_t>(iy) * g.width + ix] = occ ? -dist : dist;
    }
  }
  return sdf;
}

OccupancyGrid random_grid(std::mt19937& rng, int max_side = 64) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_real_distribution<double> density(0.0, 0.6);
  const int w = side(rng), h = side(rng);
  OccupancyGrid g(Vec2(0, 0), 0.1, w, h);
  std::bernoulli_distribution occ(density(rng));
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) g.set(ix, iy, occ(rng));
  return g;
}

}  // namespace

TEST_CASE("build_sdf equals the brute-force oracle on random grids") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const OccupancyGrid g = random_grid(rng);
    const SignedDistanceGrid fast = build_sdf(g);
    const SignedDistanceGrid slow = brute_force_sdf(g);
    REQUIRE(fast.values.size() == slow.values.size());
    for (size_t i = 0; i < fast.values.size(); ++i) CHECK(fast.values[i] == slow.values[i]);
  }
}

TEST_CASE("build_sdf sentinel on an all-free grid") {
  OccupancyGrid g(Vec2(0, 0), 0.05, 8, 4);
  const SignedDistanceGrid sdf = build_sdf(g);
  const double sentinel = 10.0 * 8 * 0.05;
  for (double v : sdf.values) CHECK(v == sentinel);
}

TEST_CASE("build_sdf around a single occupied cell") {
  OccupancyGrid g(Vec2(0, 0), 0.05, 7, 7);
  g.set(3, 3, true);
  const SignedDistanceGrid sdf = build_sdf(g);
  CHECK(sdf.at(3, 3) == doctest::Approx(-0.05));
  CHECK(sdf.at(2, 3) == doctest::Approx(0.05));
  CHECK(sdf.at(4, 3) == doctest::Approx(0.05));
  CHECK(sdf.at(3, 2) == doctest::Approx(0.05));
  CHECK(sdf.at(3, 4) == doctest::Approx(0.05));
  CHECK(sdf.at(4, 4) == doctest::Approx(0.05 * std::sqrt(2.0)));
}

TEST_CASE("build_sdf half-plane obstacle gives linear ramps") {
  OccupancyGrid g(Vec2(0, 0), 0.1, 10, 10);
  for (int iy = 0; iy < 10; ++iy)
    for (int ix = 5; ix < 10; ++ix) g.set(ix, iy, true);
  const SignedDistanceGrid sdf = build_sdf(g);
  for (int iy = 0; iy < 10; ++iy) {
    for (int ix = 0; ix < 5; ++ix) CHECK(sdf.at(ix, iy) == doctest::Approx((5 - ix) * 0.1));
    for (int ix = 5; ix < 10; ++ix) CHECK(sdf.at(ix, iy) == doctest::Approx(-(ix - 4) * 0.1));
  }
}

TEST_CASE("sdf Lipschitz bound between adjacent cells") {
  // Within one sign the field is sqrt(2)-cell Lipschitz; across the obstacle
  // boundary the center-to-center convention (values +-cell_size right at the
  // edge) makes the jump exactly two cells.
  std::mt19937 rng(9);
  const OccupancyGrid g = random_grid(rng, 32);
  const SignedDistanceGrid sdf = build_sdf(g);
  const double same_sign = g.cell_size * std::sqrt(2.0) + 1e-9;
  const double crossing = 2.0 * g.cell_size + 1e-9;
  auto check_pair = [&](double a, double b) {
    const double bound = (a >= 0.0) == (b >= 0.0) ? same_sign : crossing;
    CHECK(std::abs(a - b) <= bound);
  };
  for (int iy = 0; iy < g.height; ++iy)
    for (int ix = 0; ix + 1 < g.width; ++ix) check_pair(sdf.at(ix + 1, iy), sdf.at(ix, iy));
  for (int iy = 0; iy + 1 < g.height; ++iy)
    for (int ix = 0; ix < g.width; ++ix) check_pair(sdf.at(ix, iy + 1), sdf.at(ix, iy));
}

TEST_CASE("inflate with zero thickness returns the input") {
  std::mt19937 rng(5);
  const OccupancyGrid g = random_grid(rng, 16);
  const OccupancyGrid out = inflate(g, 0.0);
  CHECK(out.cells == g.cells);
}

TEST_CASE("inflate by one cell reaches the 4-neighborhood only") {
  OccupancyGrid g(Vec2(0, 0), 0.2, 5, 5);
  g.set(2, 2, true);
  const OccupancyGrid out = inflate(g, 0.2);
  CHECK(out.occupied(1, 2));
  CHECK(out.occupied(3, 2));
  CHECK(out.occupied(2, 1));
  CHECK(out.occupied(2, 3));
  CHECK_FALSE(out.occupied(1, 1));
  CHECK_FALSE(out.occupied(3, 3));
  CHECK_FALSE(out.occupied(0, 2));
}

TEST_CASE("inflate matches a brute-force distance check") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> thick(0.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid g = random_grid(rng, 24);
    const double t = thick(rng);
    const OccupancyGrid out = inflate(g, t);
    const double h = g.cell_size;
    for (int iy = 0; iy < g.height; ++iy) {
      for (int ix = 0; ix < g.width; ++ix) {
        bool expected = false;
        for (int jy = 0; jy < g.height && !expected; ++jy)
          for (int jx = 0; jx < g.width && !expected; ++jx)
            if (g.occupied(jx, jy) &&
                ((ix - jx) * (ix - jx) + (iy - jy) * (iy - jy)) * h * h <= t * t + 1e-12)
              expected = true;
        CHECK(out.occupied(ix, iy) == expected);
      }
    }
  }
}

TEST_CASE("inflate saturates on a fully occupied grid") {
  OccupancyGrid g(Vec2(0, 0), 0.1, 6, 3);
  std::fill(g.cells.begin(), g.cells.end(), 1);
  const OccupancyGrid out = inflate(g, 0.35);
  CHECK(out.cells == g.cells);
}

TEST_CASE("inflate is monotone in the thickness") {
  std::mt19937 rng(21);
  const OccupancyGrid g = random_grid(rng, 20);
  const OccupancyGrid small = inflate(g, 0.15);
  const OccupancyGrid big = inflate(g, 0.4);
  for (size_t i = 0; i < g.cells.size(); ++i)
    if (small.cells[i]) CHECK(big.cells[i]);
}

TEST_CASE("query_distance at a cell center returns the stored value") {
  OccupancyGrid g(Vec2(0, 0), 0.1, 8, 8);
  g.set(4, 4, true);
  const SignedDistanceGrid sdf = build_sdf(g);
  const DistanceQuery q = query_distance(sdf, g.cell_center(2, 5));
  CHECK(q.distance == doctest::Approx(sdf.at(2, 5)));
}

TEST_CASE("query_distance interpolates linearly between centers") {
  SignedDistanceGrid sdf;
  sdf.origin = Vec2(0, 0);
  sdf.cell_size = 1.0;
  sdf.width = 2;
  sdf.height = 2;
  sdf.values = {0.1, 0.3, 0.1, 0.3};  // columns valued 0.1 and 0.3
  const DistanceQuery q = query_distance(sdf, Vec2(1.0, 1.0));  // midway between centers
  CHECK(q.distance == doctest::Approx(0.2));
  CHECK(q.gradient.x() == doctest::Approx(0.2));
  CHECK(q.gradient.y() == doctest::Approx(0.0));
}

TEST_CASE("query_distance gradient matches finite differences") {
  std::mt19937 rng(33);
  OccupancyGrid g(Vec2(0, 0), 0.1, 24, 24);
  std::bernoulli_distribution occ(0.15);
  for (int iy = 0; iy < 24; ++iy)
    for (int ix = 0; ix < 24; ++ix) g.set(ix, iy, occ(rng));
  const SignedDistanceGrid sdf = build_sdf(g);

  std::uniform_real_distribution<double> coord(0.15, 2.25);  // one cell off the borders
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 p(coord(rng), coord(rng));
    const DistanceQuery q = query_distance(sdf, p);
    const double fx = (query_distance(sdf, p + Vec2(h, 0)).distance -
                       query_distance(sdf, p - Vec2(h, 0)).distance) /
                      (2 * h);
    const double fy = (query_distance(sdf, p + Vec2(0, h)).distance -
                       query_distance(sdf, p - Vec2(0, h)).distance) /
                      (2 * h);
    // Central differences straddle a patch boundary for points within h of
    // the lattice; skip those.
    const double gx = (p.x() - sdf.origin.x()) / sdf.cell_size - 0.5;
    const double gy = (p.y() - sdf.origin.y()) / sdf.cell_size - 0.5;
    if (std::abs(gx - std::round(gx)) < 1e-4 || std::abs(gy - std::round(gy)) < 1e-4) continue;
    CHECK(q.gradient.x() == doctest::Approx(fx).epsilon(1e-6));
    CHECK(q.gradient.y() == doctest::Approx(fy).epsilon(1e-6));
  }
}

TEST_CASE("query_distance approximates a 10x finer brute-force field") {
  std::mt19937 rng(55);
  OccupancyGrid g(Vec2(0, 0), 0.2, 16, 16);
  std::bernoulli_distribution occ(0.1);
  for (int iy = 0; iy < 16; ++iy)
    for (int ix = 0; ix < 16; ++ix) g.set(ix, iy, occ(rng));
  bool any = false;
  for (uint8_t c : g.cells) any |= c != 0;
  if (!any) g.set(8, 8, true);
  const SignedDistanceGrid coarse = build_sdf(g);

  // Fine-grid oracle: same occupancy rendered at 10x resolution.
  OccupancyGrid fine(Vec2(0, 0), 0.02, 160, 160);
  for (int iy = 0; iy < 160; ++iy)
    for (int ix = 0; ix < 160; ++ix) fine.set(ix, iy, g.occupied(ix / 10, iy / 10));
  const SignedDistanceGrid fine_sdf = build_sdf(fine);

  std::uniform_real_distribution<double> coord(0.3, 2.9);
  for (int trial = 0; trial < 60; ++trial) {
    const Vec2 p(coord(rng), coord(rng));
    const double coarse_d = query_distance(coarse, p).distance;
    const double fine_d = query_distance(fine_sdf, p).distance;
    CHECK(std::abs(coarse_d - fine_d) <= g.cell_size);
  }
}

TEST_CASE("query_distance rejects out-of-bounds points") {
  OccupancyGrid g(Vec2(0, 0), 0.1, 4, 4);
  g.set(1, 1, true);
  const SignedDistanceGrid sdf = build_sdf(g);
  CHECK_THROWS_AS(query_distance(sdf, Vec2(-0.01, 0.2)), OutOfBoundsError);
  CHECK_THROWS_AS(query_distance(sdf, Vec2(0.2, 0.41)), OutOfBoundsError);
}

TEST_CASE("rect_is_free on an empty map") {
  OccupancyGrid g(Vec2(0, 0), 0.1, 20, 20);
  OrientedRect r{Vec2(1.0, 1.0), 0.5, 0.3, 0.4};
  CHECK(rect_is_free(g, r));
}

TEST_CASE("rect_is_free detects a contained occupied center") {
  OccupancyGrid g(Vec2(0, 0), 0.1, 20, 20);
  g.set(10, 10, true);  // center (1.05, 1.05)
  OrientedRect r{Vec2(1.0, 1.0), 0.2, 0.2, 0.0};
  CHECK_FALSE(rect_is_free(g, r));
}

TEST_CASE("rect_is_free ignores cells grazed without their centers") {
  OccupancyGrid g(Vec2(0, 0), 0.1, 20, 20);
  g.set(10, 10, true);  // center (1.05, 1.05), cell spans [1.0, 1.1]
  // Rectangle up to x = 1.02: overlaps the cell area but not its center.
  OrientedRect r{Vec2(0.52, 1.05), 0.5, 0.3, 0.0};
  CHECK(rect_is_free(g, r));

  // Brute-force agreement over random rectangles.
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> coord(0.2, 1.8), len(0.05, 0.6), ang(-1.5, 1.5);
  std::bernoulli_distribution occ(0.2);
  for (int iy = 0; iy < 20; ++iy)
    for (int ix = 0; ix < 20; ++ix) g.set(ix, iy, occ(rng));
  for (int trial = 0; trial < 200; ++trial) {
    OrientedRect rect{Vec2(coord(rng), coord(rng)), len(rng), len(rng), ang(rng)};
    bool expected = true;
    for (int iy = 0; iy < 20 && expected; ++iy)
      for (int ix = 0; ix < 20 && expected; ++ix)
        if (g.occupied(ix, iy) && rect.contains(g.cell_center(ix, iy))) expected = false;
    CHECK(rect_is_free(g, rect) == expected);
  }
}

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include "gpform/cost_factors.hpp"
#include "gpform/environment.hpp"
#include "gpform/gp_model.hpp"

namespace gpform::testing {

// 24x24 map with a centered obstacle block, 0.1 m cells: positions in
// [0.2, 2.2]^2 stay queryable with room for finite-difference probes.
inline std::shared_ptr<const SignedDistanceGrid> make_test_sdf() {
  OccupancyGrid g(Vec2(0, 0), 0.1, 24, 24);
  for (int iy = 9; iy < 15; ++iy)
    for (int ix = 9; ix < 15; ++ix) g.set(ix, iy, true);
  return std::make_shared<SignedDistanceGrid>(build_sdf(g));
}

inline SupportState random_state(std::mt19937& rng, int num_robots, double t, double lo = 0.3,
                                 double hi = 2.1) {
  std::uniform_real_distribution<double> pos(lo, hi), vel(-1.0, 1.0);
  Eigen::Matrix2Xd p(2, num_robots), v(2, num_robots);
  for (int i = 0; i < num_robots; ++i) {
    p.col(i) << pos(rng), pos(rng);
    v.col(i) << vel(rng), vel(rng);
  }
  return SupportState(t, p, v);
}

// Central finite differences of a vector residual w.r.t. the flattened state.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const SupportState&)>& f,
                                   const SupportState& at, double step = 1e-6) {
  const Eigen::VectorXd base = f(at);
  Eigen::MatrixXd jac(base.size(), at.dim());
  const Eigen::VectorXd x = at.flatten();
  for (int d = 0; d < at.dim(); ++d) {
    Eigen::VectorXd xp = x, xm = x;
    xp(d) += step;
    xm(d) -= step;
    jac.col(d) = (f(SupportState::unflatten(at.time, xp)) -
                  f(SupportState::unflatten(at.time, xm))) /
                 (2.0 * step);
  }
  return jac;
}

// True when the state sits at least `margin` away from every hinge kink and
// bilinear patch edge that the given costs could hit.
inline bool margins_ok(const SupportState& s, const SignedDistanceGrid* sdf,
                       const HingeParams& hp, const FormationLayout* layout,
                       double margin = 1e-4) {
  const int n = s.num_robots();
  if (sdf) {
    for (int i = 0; i < n; ++i) {
      const Vec2 p = s.positions.col(i);
      const double gx = (p.x() - sdf->origin.x()) / sdf->cell_size - 0.5;
      const double gy = (p.y() - sdf->origin.y()) / sdf->cell_size - 0.5;
      if (std::abs(gx - std::round(gx)) * sdf->cell_size < margin) return false;
      if (std::abs(gy - std::round(gy)) * sdf->cell_size < margin) return false;
      if (std::abs(query_distance(*sdf, p).distance - hp.eps_obs) < margin) return false;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = (s.positions.col(i) - s.positions.col(j)).norm();
      if (std::abs(d - hp.eps_col) < margin || d < margin) return false;
    }
  if (layout) {
    for (int i = 0; i < n; ++i) {
      if (i == layout->origin_robot) continue;
      const double df = ((s.positions.col(i) - s.positions.col(layout->origin_robot)) -
                         layout->offsets.col(i))
                            .norm();
      if (std::abs(df - hp.eps_form) < margin || df < margin) return false;
    }
  }
  return true;
}

inline double max_rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace gpform::testing

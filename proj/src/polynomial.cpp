#include "gpform/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpform/errors.hpp"

namespace gpform {

namespace {

double falling(int i, int k) {  // i! / (i - k)!
  double f = 1.0;
  for (int j = 0; j < k; ++j) f *= i - j;
  return f;
}

// Row of the k-th time derivative at normalized position s of a segment of
// duration d (chain rule scaling 1/d^k).
Eigen::Matrix<double, 1, 8> derivative_row(int k, double s, double d) {
  Eigen::Matrix<double, 1, 8> row = Eigen::Matrix<double, 1, 8>::Zero();
  for (int i = k; i < 8; ++i) row(i) = falling(i, k) * std::pow(s, i - k) / std::pow(d, k);
  return row;
}

// GP-interpolated position/velocity of every robot at time t.
SupportState state_at(const FactorGraph& graph, const Trajectory& solution, double t) {
  const auto& times = graph.support_times;
  if (t <= times.front()) return solution.front();
  if (t >= times.back()) return solution.back();
  size_t k = 0;
  while (k + 2 < times.size() && times[k + 1] < t) ++k;
  return interpolate(solution[k], solution[k + 1], t, graph.qc_scale).state;
}

}  // namespace

Eigen::Vector2d PiecewisePolynomial::position(int robot, double t) const {
  const auto& segs = robots.at(robot);
  size_t k = 0;
  while (k + 1 < segs.size() && segs[k].t1 < t) ++k;
  const auto& seg = segs[k];
  const double d = seg.t1 - seg.t0;
  const double s = std::clamp((t - seg.t0) / d, 0.0, 1.0);
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  double sp = 1.0;
  for (int i = 0; i < 8; ++i, sp *= s) p += sp * seg.coeffs.row(i).transpose();
  return p;
}

Eigen::Vector2d PiecewisePolynomial::velocity(int robot, double t) const {
  const auto& segs = robots.at(robot);
  size_t k = 0;
  while (k + 1 < segs.size() && segs[k].t1 < t) ++k;
  const auto& seg = segs[k];
  const double d = seg.t1 - seg.t0;
  const double s = std::clamp((t - seg.t0) / d, 0.0, 1.0);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int i = 1; i < 8; ++i)
    v += falling(i, 1) * std::pow(s, i - 1) / d * seg.coeffs.row(i).transpose();
  return v;
}

std::vector<double> polynomial_boundaries(const std::vector<double>& support_times,
                                          const std::vector<std::pair<double, double>>& holds) {
  // Support times plus their midpoints: the GP trajectory is only C1 at
  // support times, so a C3 piecewise polynomial needs knots at least this
  // dense to stay within a few centimeters of it.
  std::vector<double> b = support_times;
  for (size_t i = 0; i + 1 < support_times.size(); ++i)
    b.push_back(0.5 * (support_times[i] + support_times[i + 1]));
  for (const auto& [lo, hi] : holds) {
    b.push_back(lo);
    b.push_back(hi);
  }
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double t : b)
    if (out.empty() || t - out.back() > 1e-9) out.push_back(t);
  // Clamp to the mission horizon.
  std::vector<double> clipped;
  for (double t : out)
    if (t >= support_times.front() - 1e-9 && t <= support_times.back() + 1e-9)
      clipped.push_back(t);
  return clipped;
}

PiecewisePolynomial fit_polynomials(const FactorGraph& graph, const Trajectory& solution,
                                    const std::vector<double>& boundaries) {
  if (boundaries.size() < 2)
    throw std::invalid_argument("fit_polynomials: need at least one segment");
  for (size_t i = 1; i < boundaries.size(); ++i)
    if (!(boundaries[i] > boundaries[i - 1] + 1e-12))
      throw std::invalid_argument("fit_polynomials: boundaries must be strictly increasing");

  const int num_segments = static_cast<int>(boundaries.size()) - 1;
  const int n = graph.num_robots;
  const int num_vars = 8 * num_segments;
  const int num_constraints = 4 * num_segments + 2 * (num_segments - 1);

  // Snap Gram matrix and constraint rows are shared across robots; only the
  // right-hand side changes.
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(num_vars, num_vars);
  Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(num_constraints, num_vars);
  for (int sgm = 0; sgm < num_segments; ++sgm) {
    const double d = boundaries[sgm + 1] - boundaries[sgm];
    const double d7 = std::pow(d, 7);
    for (int i = 4; i < 8; ++i)
      for (int j = 4; j < 8; ++j)
        quad(8 * sgm + i, 8 * sgm + j) = falling(i, 4) * falling(j, 4) / (i + j - 7) / d7;
  }
  int row = 0;
  for (int sgm = 0; sgm < num_segments; ++sgm) {
    const double d = boundaries[sgm + 1] - boundaries[sgm];
    constraints.block<1, 8>(row++, 8 * sgm) = derivative_row(0, 0.0, d);
    constraints.block<1, 8>(row++, 8 * sgm) = derivative_row(1, 0.0, d);
    constraints.block<1, 8>(row++, 8 * sgm) = derivative_row(0, 1.0, d);
    constraints.block<1, 8>(row++, 8 * sgm) = derivative_row(1, 1.0, d);
  }
  for (int sgm = 0; sgm + 1 < num_segments; ++sgm) {
    const double dl = boundaries[sgm + 1] - boundaries[sgm];
    const double dr = boundaries[sgm + 2] - boundaries[sgm + 1];
    for (int k : {2, 3}) {
      constraints.block<1, 8>(row, 8 * sgm) = derivative_row(k, 1.0, dl);
      constraints.block<1, 8>(row, 8 * (sgm + 1)) = -derivative_row(k, 0.0, dr);
      ++row;
    }
  }

  // Equilibrate before factoring: scaling the objective uniformly and the
  // constraint rows individually leaves the minimizer untouched (only the
  // multipliers change) but keeps the KKT factorization well conditioned.
  const double quad_scale = std::max(quad.cwiseAbs().maxCoeff(), 1.0);
  quad /= quad_scale;
  Eigen::VectorXd row_scale(num_constraints);
  for (int r = 0; r < num_constraints; ++r) {
    row_scale(r) = std::max(constraints.row(r).cwiseAbs().maxCoeff(), 1e-12);
    constraints.row(r) /= row_scale(r);
  }

  const int kkt_dim = num_vars + num_constraints;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(kkt_dim, kkt_dim);
  kkt.topLeftCorner(num_vars, num_vars) = quad;
  kkt.topRightCorner(num_vars, num_constraints) = constraints.transpose();
  kkt.bottomLeftCorner(num_constraints, num_vars) = constraints;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible())
    throw NumericFailureError("fit_polynomials: singular KKT system", {});

  // Boundary states once, shared across robots.
  std::vector<SupportState> bstates;
  bstates.reserve(boundaries.size());
  for (double t : boundaries) bstates.push_back(state_at(graph, solution, t));

  PiecewisePolynomial poly;
  poly.robots.resize(n);
  for (int robot = 0; robot < n; ++robot) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(kkt_dim, 2);
    int r = num_vars;
    for (int sgm = 0; sgm < num_segments; ++sgm) {
      rhs.row(r++) = bstates[sgm].positions.col(robot).transpose();
      rhs.row(r++) = bstates[sgm].velocities.col(robot).transpose();
      rhs.row(r++) = bstates[sgm + 1].positions.col(robot).transpose();
      rhs.row(r++) = bstates[sgm + 1].velocities.col(robot).transpose();
    }
    for (int cr = 0; cr < num_constraints; ++cr) rhs.row(num_vars + cr) /= row_scale(cr);
    const Eigen::MatrixXd sol = lu.solve(rhs);

    auto& segs = poly.robots[robot];
    segs.resize(num_segments);
    for (int sgm = 0; sgm < num_segments; ++sgm) {
      segs[sgm].t0 = boundaries[sgm];
      segs[sgm].t1 = boundaries[sgm + 1];
      segs[sgm].coeffs = sol.block<8, 2>(8 * sgm, 0);
    }
  }
  return poly;
}

}  // namespace gpform

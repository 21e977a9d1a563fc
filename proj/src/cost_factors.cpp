#include "gpform/cost_factors.hpp"

#include <cmath>
#include <stdexcept>

namespace gpform {

void HingeParams::validate() const {
  if (eps_obs < 0 || eps_col < 0 || eps_form < 0)
    throw std::invalid_argument("hinge thresholds must be non-negative");
  if (sigma_obs <= 0 || sigma_col <= 0 || sigma_form <= 0)
    throw std::invalid_argument("sigmas must be positive");
}

FormationLayout FormationLayout::from_spec(const FormationSpec& spec) {
  const AssignmentMatrix& a = spec.assignment;
  a.validate();
  if (a.rows != spec.rows || a.cols != spec.cols)
    throw std::invalid_argument("formation layout: assignment dims mismatch");

  FormationLayout layout;
  layout.origin_robot = -1;
  int origin_r = 0, origin_c = 0;
  for (int r = 0; r < a.rows && layout.origin_robot < 0; ++r)
    for (int c = 0; c < a.cols && layout.origin_robot < 0; ++c)
      if (!a.is_virtual(a.at(r, c))) {
        layout.origin_robot = a.at(r, c);
        origin_r = r;
        origin_c = c;
      }
  if (layout.origin_robot < 0) throw std::invalid_argument("formation has no real robots");

  const double ch = std::cos(spec.heading), sh = std::sin(spec.heading);
  layout.offsets = Eigen::Matrix2Xd::Zero(2, a.num_real);
  for (int r = 0; r < a.rows; ++r) {
    for (int c = 0; c < a.cols; ++c) {
      const int id = a.at(r, c);
      if (a.is_virtual(id)) continue;
      const double lx = (c - origin_c) * spec.spacing;
      const double ly = -(r - origin_r) * spec.spacing;
      layout.offsets.col(id) = Eigen::Vector2d(ch * lx - sh * ly, sh * lx + ch * ly);
    }
  }
  return layout;
}

ResidualJacobian obstacle_residual(const SupportState& state, const SignedDistanceGrid& sdf,
                                   double eps_obs) {
  const int n = state.num_robots();
  ResidualJacobian out;
  out.residual = Eigen::VectorXd::Zero(n);
  out.jacobian = Eigen::MatrixXd::Zero(n, state.dim());
  for (int i = 0; i < n; ++i) {
    const DistanceQuery q = query_distance(sdf, state.positions.col(i));
    if (q.distance < eps_obs) {
      out.residual(i) = eps_obs - q.distance;
      out.jacobian(i, 2 * i) = -q.gradient.x();
      out.jacobian(i, 2 * i + 1) = -q.gradient.y();
    }
  }
  return out;
}

ResidualJacobian collision_residual(const SupportState& state, double eps_col) {
  const int n = state.num_robots();
  if (n < 2) throw std::invalid_argument("collision_residual needs at least two robots");
  const int pairs = n * (n - 1) / 2;
  ResidualJacobian out;
  out.residual = Eigen::VectorXd::Zero(pairs);
  out.jacobian = Eigen::MatrixXd::Zero(pairs, state.dim());
  int row = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++row) {
      const Eigen::Vector2d diff = state.positions.col(i) - state.positions.col(j);
      const double dist = diff.norm();
      if (dist >= eps_col) continue;
      // Descent direction for a coincident pair is arbitrary; a fixed one
      // keeps runs reproducible.
      const Eigen::Vector2d u = dist < 1e-9 ? Eigen::Vector2d(1.0, 0.0) : (diff / dist).eval();
      out.residual(row) = eps_col - dist;
      out.jacobian(row, 2 * i) = -u.x();
      out.jacobian(row, 2 * i + 1) = -u.y();
      out.jacobian(row, 2 * j) = u.x();
      out.jacobian(row, 2 * j + 1) = u.y();
    }
  }
  return out;
}

ResidualJacobian formation_residual(const SupportState& state, const FormationLayout& layout,
                                    double eps_form) {
  const int n = state.num_robots();
  if (layout.offsets.cols() != n)
    throw std::invalid_argument("formation_residual: layout does not cover every robot");
  const int o = layout.origin_robot;

  ResidualJacobian out;
  out.residual = Eigen::VectorXd::Zero(n - 1);
  out.jacobian = Eigen::MatrixXd::Zero(n - 1, state.dim());
  int row = 0;
  for (int i = 0; i < n; ++i) {
    if (i == o) continue;
    const Eigen::Vector2d dev =
        (state.positions.col(i) - state.positions.col(o)) - layout.offsets.col(i);
    const double df = dev.norm();
    if (df > eps_form) {
      out.residual(row) = df - eps_form;
      const Eigen::Vector2d u = df < 1e-12 ? Eigen::Vector2d(1.0, 0.0) : (dev / df).eval();
      out.jacobian(row, 2 * i) = u.x();
      out.jacobian(row, 2 * i + 1) = u.y();
      out.jacobian(row, 2 * o) = -u.x();
      out.jacobian(row, 2 * o + 1) = -u.y();
    }
    ++row;
  }
  return out;
}

}  // namespace gpform

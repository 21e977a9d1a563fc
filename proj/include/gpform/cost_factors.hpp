#pragma once

#include <Eigen/Dense>

#include "gpform/environment.hpp"
#include "gpform/formation.hpp"
#include "gpform/gp_model.hpp"

namespace gpform {

/// Hinge thresholds and per-factor noise scales (a higher sigma means a
/// lower weight; each factor weight is (1/sigma^2) * I).
struct HingeParams {
  double eps_obs = 0.2;
  double eps_col = 0.2;
  double eps_form = 0.01;
  double sigma_obs = 0.1;
  double sigma_col = 0.1;
  double sigma_form = 0.3;

  void validate() const;
};

/// Residual plus its Jacobian w.r.t. the flattened 4N state.
struct ResidualJacobian {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
};

/// Per-robot expected offsets from the origin robot, rotated into the world
/// frame, ready for residual evaluation. origin_robot holds the slot closest
/// to (0, 0) in reading order among the real robots.
struct FormationLayout {
  int origin_robot = 0;
  Eigen::Matrix2Xd offsets;  // column i = expected x_i - x_origin

  static FormationLayout from_spec(const FormationSpec& spec);
};

/// Obstacle hinge per robot: max(0, eps_obs - d_o(x_i)).
ResidualJacobian obstacle_residual(const SupportState& state, const SignedDistanceGrid& sdf,
                                   double eps_obs);

/// Pairwise hinge per (i, j), i < j: max(0, eps_col - |x_i - x_j|).
/// Coincident pairs fall back to the fixed separation direction (1, 0).
ResidualJacobian collision_residual(const SupportState& state, double eps_col);

/// Formation hinge per non-origin robot: max(0, d_f - eps_form), where d_f
/// is the deviation of the robot's position relative to the origin robot
/// from its expected formation offset.
ResidualJacobian formation_residual(const SupportState& state, const FormationLayout& layout,
                                    double eps_form);

/// Residual of any base factor evaluated at the GP-interpolated state, with
/// the Jacobian chained onto the two bracketing support states.
struct InterpolatedResidual {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian_prev;
  Eigen::MatrixXd jacobian_next;
};

template <typename BaseEval>
InterpolatedResidual interpolated_residual(const SupportState& prev, const SupportState& next,
                                           double tau, double qc_scale, BaseEval&& base) {
  const Interpolation interp = interpolate(prev, next, tau, qc_scale);
  const ResidualJacobian rj = base(interp.state);
  InterpolatedResidual out;
  out.residual = rj.residual;
  out.jacobian_prev = rj.jacobian * interp.lambda;
  out.jacobian_next = rj.jacobian * interp.psi;
  return out;
}

}  // namespace gpform

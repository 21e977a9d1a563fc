#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gpform {

/// Stacked planar state of the whole team at one timestamp. The flattened
/// layout is all positions first, then all velocities:
///   [x_1 y_1 ... x_N y_N  vx_1 vy_1 ... vx_N vy_N]
struct SupportState {
  double time = 0.0;
  Eigen::Matrix2Xd positions;   // column i = robot i position [m]
  Eigen::Matrix2Xd velocities;  // column i = robot i velocity [m/s]

  SupportState() = default;
  SupportState(double t, Eigen::Matrix2Xd pos, Eigen::Matrix2Xd vel);

  int num_robots() const { return static_cast<int>(positions.cols()); }
  int dim() const { return 4 * num_robots(); }

  Eigen::VectorXd flatten() const;
  static SupportState unflatten(double t, const Eigen::VectorXd& v);
};

/// Constant-velocity GP prior configuration.
struct GpParams {
  double qc_scale = 1.0;              // Q_c = qc_scale * I
  int num_robots = 1;
  std::vector<double> support_times;  // strictly increasing, >= 2 entries

  void validate() const;  // throws std::invalid_argument
};

/// State transition matrix over the position/velocity partition:
/// [[I, dt*I], [0, I]], size 4N x 4N.
Eigen::MatrixXd transition(double dt, int num_robots);

/// Process-noise covariance of the constant-velocity model:
/// qc * [[dt^3/3 I, dt^2/2 I], [dt^2/2 I, dt I]]. Requires dt > 0.
Eigen::MatrixXd gp_cov(double dt, double qc_scale, int num_robots);

/// Closed-form inverse of gp_cov (the GP factor information matrix).
Eigen::MatrixXd gp_cov_inverse(double dt, double qc_scale, int num_robots);

/// Residual of the noise-free constant-velocity flow between two states:
/// transition(dt) * flatten(prev) - flatten(next).
Eigen::VectorXd gp_prior_error(const SupportState& prev, const SupportState& next);

struct Interpolation {
  SupportState state;
  Eigen::MatrixXd lambda;  // weight on the earlier support state
  Eigen::MatrixXd psi;     // weight on the later support state
};

/// GP interpolation of the state at time tau in [prev.time, next.time].
/// The returned matrices satisfy flatten(state) = lambda*flatten(prev) +
/// psi*flatten(next), so factor Jacobians at tau can be chained onto the
/// two bracketing support states.
Interpolation interpolate(const SupportState& prev, const SupportState& next, double tau,
                          double qc_scale = 1.0);

}  // namespace gpform

#include "gpform/gp_model.hpp"

#include <cmath>
#include <stdexcept>

namespace gpform {

namespace {

// Expand a 2x2 scalar pattern [[a, b], [c, d]] over the position/velocity
// partition: [[a*I, b*I], [c*I, d*I]] with I of size 2N.
Eigen::MatrixXd expand_block(double a, double b, double c, double d, int num_robots) {
  const int h = 2 * num_robots;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * h, 2 * h);
  m.topLeftCorner(h, h) = a * Eigen::MatrixXd::Identity(h, h);
  m.topRightCorner(h, h) = b * Eigen::MatrixXd::Identity(h, h);
  m.bottomLeftCorner(h, h) = c * Eigen::MatrixXd::Identity(h, h);
  m.bottomRightCorner(h, h) = d * Eigen::MatrixXd::Identity(h, h);
  return m;
}

void check_robots(int num_robots) {
  if (num_robots < 1) throw std::invalid_argument("num_robots must be >= 1");
}

}  // namespace

SupportState::SupportState(double t, Eigen::Matrix2Xd pos, Eigen::Matrix2Xd vel)
    : time(t), positions(std::move(pos)), velocities(std::move(vel)) {
  if (positions.cols() != velocities.cols())
    throw std::invalid_argument("positions and velocities must cover the same robots");
  if (positions.cols() < 1) throw std::invalid_argument("SupportState needs at least one robot");
  if (!positions.allFinite() || !velocities.allFinite())
    throw std::invalid_argument("SupportState entries must be finite");
}

Eigen::VectorXd SupportState::flatten() const {
  const int n = num_robots();
  Eigen::VectorXd v(4 * n);
  v.head(2 * n) = Eigen::Map<const Eigen::VectorXd>(positions.data(), 2 * n);
  v.tail(2 * n) = Eigen::Map<const Eigen::VectorXd>(velocities.data(), 2 * n);
  return v;
}

SupportState SupportState::unflatten(double t, const Eigen::VectorXd& v) {
  if (v.size() % 4 != 0 || v.size() == 0)
    throw std::invalid_argument("flattened state length must be a positive multiple of 4");
  const int n = static_cast<int>(v.size()) / 4;
  SupportState s;
  s.time = t;
  s.positions = Eigen::Map<const Eigen::Matrix2Xd>(v.data(), 2, n);
  s.velocities = Eigen::Map<const Eigen::Matrix2Xd>(v.data() + 2 * n, 2, n);
  return s;
}

void GpParams::validate() const {
  if (qc_scale <= 0.0) throw std::invalid_argument("qc_scale must be positive");
  if (num_robots < 1) throw std::invalid_argument("num_robots must be >= 1");
  if (support_times.size() < 2) throw std::invalid_argument("need at least two support times");
  for (size_t i = 1; i < support_times.size(); ++i)
    if (!(support_times[i] > support_times[i - 1]))
      throw std::invalid_argument("support times must be strictly increasing");
}

Eigen::MatrixXd transition(double dt, int num_robots) {
  check_robots(num_robots);
  if (dt < 0.0) throw std::invalid_argument("transition: dt must be non-negative");
  return expand_block(1.0, dt, 0.0, 1.0, num_robots);
}

Eigen::MatrixXd gp_cov(double dt, double qc_scale, int num_robots) {
  check_robots(num_robots);
  if (dt <= 0.0) throw std::invalid_argument("gp_cov: dt must be positive");
  if (qc_scale <= 0.0) throw std::invalid_argument("gp_cov: qc_scale must be positive");
  const double a = qc_scale * dt * dt * dt / 3.0;
  const double b = qc_scale * dt * dt / 2.0;
  const double c = qc_scale * dt;
  return expand_block(a, b, b, c, num_robots);
}

Eigen::MatrixXd gp_cov_inverse(double dt, double qc_scale, int num_robots) {
  check_robots(num_robots);
  if (dt <= 0.0) throw std::invalid_argument("gp_cov_inverse: dt must be positive");
  if (qc_scale <= 0.0) throw std::invalid_argument("gp_cov_inverse: qc_scale must be positive");
  const double a = 12.0 / (qc_scale * dt * dt * dt);
  const double b = -6.0 / (qc_scale * dt * dt);
  const double c = 4.0 / (qc_scale * dt);
  return expand_block(a, b, b, c, num_robots);
}

Eigen::VectorXd gp_prior_error(const SupportState& prev, const SupportState& next) {
  if (prev.num_robots() != next.num_robots())
    throw std::invalid_argument("gp_prior_error: robot counts differ");
  const double dt = next.time - prev.time;
  if (!(dt > 0.0)) throw std::invalid_argument("gp_prior_error: next.time must exceed prev.time");
  return transition(dt, prev.num_robots()) * prev.flatten() - next.flatten();
}

Interpolation interpolate(const SupportState& prev, const SupportState& next, double tau,
                          double qc_scale) {
  if (prev.num_robots() != next.num_robots())
    throw std::invalid_argument("interpolate: robot counts differ");
  const double t0 = prev.time, t1 = next.time;
  if (!(t1 > t0)) throw std::invalid_argument("interpolate: support times not increasing");
  if (tau < t0 || tau > t1) throw std::invalid_argument("interpolate: tau outside support interval");

  const int n = prev.num_robots();
  const int dim = 4 * n;

  Interpolation out;
  if (tau == t0) {
    out.state = prev;
    out.lambda = Eigen::MatrixXd::Identity(dim, dim);
    out.psi = Eigen::MatrixXd::Zero(dim, dim);
    return out;
  }
  if (tau == t1) {
    out.state = next;
    out.lambda = Eigen::MatrixXd::Zero(dim, dim);
    out.psi = Eigen::MatrixXd::Identity(dim, dim);
    return out;
  }

  // Work in the 2x2 scalar pattern; every matrix involved is that pattern
  // Kronecker the 2N identity.
  const double da = tau - t0;
  const double db = t1 - tau;
  const double dt = t1 - t0;

  using M2 = Eigen::Matrix2d;
  M2 q_a;
  q_a << qc_scale * da * da * da / 3.0, qc_scale * da * da / 2.0,
      qc_scale * da * da / 2.0, qc_scale * da;
  M2 phi_b_t;  // transition(db) transposed
  phi_b_t << 1.0, 0.0, db, 1.0;
  M2 q_dt_inv;
  q_dt_inv << 12.0 / (qc_scale * dt * dt * dt), -6.0 / (qc_scale * dt * dt),
      -6.0 / (qc_scale * dt * dt), 4.0 / (qc_scale * dt);
  M2 phi_a;
  phi_a << 1.0, da, 0.0, 1.0;
  M2 phi_dt;
  phi_dt << 1.0, dt, 0.0, 1.0;

  const M2 psi2 = q_a * phi_b_t * q_dt_inv;
  const M2 lam2 = phi_a - psi2 * phi_dt;

  out.psi = expand_block(psi2(0, 0), psi2(0, 1), psi2(1, 0), psi2(1, 1), n);
  out.lambda = expand_block(lam2(0, 0), lam2(0, 1), lam2(1, 0), lam2(1, 1), n);
  out.state = SupportState::unflatten(tau, out.lambda * prev.flatten() + out.psi * next.flatten());
  return out;
}

}  // namespace gpform

#include "gpform/factor_graph.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpform/errors.hpp"

namespace gpform {

bool is_interpolated(FactorKind kind) {
  return kind == FactorKind::kInterpObstacle || kind == FactorKind::kInterpCollision ||
         kind == FactorKind::kInterpFormation;
}

void FactorGraph::validate() const {
  const int k = num_states();
  if (k < 2) throw std::invalid_argument("graph needs at least two support states");
  for (int i = 1; i < k; ++i)
    if (!(support_times[i] > support_times[i - 1]))
      throw std::invalid_argument("support times must be strictly increasing");
  int gp_count = 0;
  for (const Factor& f : factors) {
    if (f.key0 < 0 || f.key0 >= k || (f.key1 >= 0 && f.key1 >= k))
      throw std::invalid_argument("factor references a missing support state");
    if (f.num_keys() == 2 && f.key1 != f.key0 + 1)
      throw std::invalid_argument("two-key factors must reference consecutive states");
    if (f.kind == FactorKind::kGpPrior) ++gp_count;
  }
  if (gp_count != k - 1)
    throw std::invalid_argument("consecutive states must be linked by exactly one gp prior");
}

namespace {

Eigen::VectorXd prior_target(const Eigen::Matrix2Xd& positions) {
  const int n = static_cast<int>(positions.cols());
  Eigen::VectorXd t = Eigen::VectorXd::Zero(4 * n);
  t.head(2 * n) = Eigen::Map<const Eigen::VectorXd>(positions.data(), 2 * n);
  return t;  // velocities zero
}

bool inside(double t, double lo, double hi) { return t >= lo - 1e-9 && t <= hi + 1e-9; }

}  // namespace

std::pair<FactorGraph, Trajectory> build_graph(const GraphSpec& spec) {
  if (spec.num_robots < 1) throw std::invalid_argument("build_graph: need at least one robot");
  if (spec.support_times.size() < 2)
    throw std::invalid_argument("build_graph: need at least two support states");
  if (spec.start_positions.cols() != spec.num_robots ||
      spec.goal_positions.cols() != spec.num_robots)
    throw std::invalid_argument("build_graph: start/goal positions must cover every robot");
  if (spec.n_ip < 0) throw std::invalid_argument("build_graph: n_ip must be non-negative");
  spec.hinge.validate();
  if (!spec.sdf) throw std::invalid_argument("build_graph: missing signed distance field");

  const double t0 = spec.support_times.front();
  const double total = spec.support_times.back();
  double prev_end = t0 - 1.0;
  for (const auto& hold : spec.holds) {
    if (!(hold.t_end > hold.t_start))
      throw std::invalid_argument("build_graph: empty hold interval in formation plan");
    if (hold.t_start < t0 - 1e-9 || hold.t_end > total + 1e-9)
      throw std::invalid_argument("build_graph: hold interval outside the mission horizon");
    if (hold.t_start < prev_end - 1e-9)
      throw std::invalid_argument("build_graph: overlapping hold intervals");
    prev_end = hold.t_end;
  }

  FactorGraph graph;
  graph.support_times = spec.support_times;
  graph.num_robots = spec.num_robots;
  graph.qc_scale = spec.qc_scale;
  graph.hinge = spec.hinge;
  graph.sdf = spec.sdf;
  for (const auto& hold : spec.holds)
    graph.formation_layouts.push_back(FormationLayout::from_spec(hold.formation));

  const int k = graph.num_states();

  Factor start;
  start.kind = FactorKind::kStartPrior;
  start.key0 = 0;
  start.sigma = spec.start_sigma;
  start.target = prior_target(spec.start_positions);
  graph.factors.push_back(std::move(start));

  Factor goal;
  goal.kind = FactorKind::kGoalPrior;
  goal.key0 = k - 1;
  goal.sigma = spec.goal_sigma;
  goal.target = prior_target(spec.goal_positions);
  graph.factors.push_back(std::move(goal));

  for (int i = 0; i + 1 < k; ++i) {
    Factor f;
    f.kind = FactorKind::kGpPrior;
    f.key0 = i;
    f.key1 = i + 1;
    graph.factors.push_back(std::move(f));
  }

  for (int i = 0; i < k; ++i) {
    Factor f;
    f.kind = FactorKind::kObstacle;
    f.key0 = i;
    f.sigma = spec.hinge.sigma_obs;
    graph.factors.push_back(std::move(f));
  }
  if (spec.num_robots >= 2) {
    for (int i = 0; i < k; ++i) {
      Factor f;
      f.kind = FactorKind::kCollision;
      f.key0 = i;
      f.sigma = spec.hinge.sigma_col;
      graph.factors.push_back(std::move(f));
    }
  }

  // Interpolated obstacle/collision factors on a uniform tau grid per
  // support interval.
  for (int i = 0; i + 1 < k; ++i) {
    const double dt = spec.support_times[i + 1] - spec.support_times[i];
    for (int j = 1; j <= spec.n_ip; ++j) {
      const double tau = spec.support_times[i] + dt * j / (spec.n_ip + 1);
      Factor fo;
      fo.kind = FactorKind::kInterpObstacle;
      fo.key0 = i;
      fo.key1 = i + 1;
      fo.tau = tau;
      fo.sigma = spec.hinge.sigma_obs;
      graph.factors.push_back(std::move(fo));
      if (spec.num_robots >= 2) {
        Factor fc;
        fc.kind = FactorKind::kInterpCollision;
        fc.key0 = i;
        fc.key1 = i + 1;
        fc.tau = tau;
        fc.sigma = spec.hinge.sigma_col;
        graph.factors.push_back(std::move(fc));
      }
    }
  }

  // Formation factors only where a hold interval covers the time; a single
  // robot has no relative geometry to constrain.
  if (spec.num_robots >= 2) {
    for (size_t h = 0; h < spec.holds.size(); ++h) {
      const auto& hold = spec.holds[h];
      for (int i = 0; i < k; ++i) {
        if (!inside(spec.support_times[i], hold.t_start, hold.t_end)) continue;
        Factor f;
        f.kind = FactorKind::kFormation;
        f.key0 = i;
        f.sigma = spec.hinge.sigma_form;
        f.formation_index = static_cast<int>(h);
        graph.factors.push_back(std::move(f));
      }
      for (int i = 0; i + 1 < k; ++i) {
        const double dt = spec.support_times[i + 1] - spec.support_times[i];
        for (int j = 1; j <= spec.n_ip; ++j) {
          const double tau = spec.support_times[i] + dt * j / (spec.n_ip + 1);
          if (!inside(tau, hold.t_start, hold.t_end)) continue;
          Factor f;
          f.kind = FactorKind::kInterpFormation;
          f.key0 = i;
          f.key1 = i + 1;
          f.tau = tau;
          f.sigma = spec.hinge.sigma_form;
          f.formation_index = static_cast<int>(h);
          graph.factors.push_back(std::move(f));
        }
      }
    }
  }

  graph.validate();

  // Constant-velocity straight line from start to goal for every robot.
  Trajectory init;
  init.reserve(k);
  const double horizon = total - t0;
  for (int i = 0; i < k; ++i) {
    const double s = (spec.support_times[i] - t0) / horizon;
    SupportState st;
    st.time = spec.support_times[i];
    st.positions = spec.start_positions + s * (spec.goal_positions - spec.start_positions);
    st.velocities = (spec.goal_positions - spec.start_positions) / horizon;
    init.push_back(std::move(st));
  }
  return {std::move(graph), std::move(init)};
}

double FactorEval::cost() const {
  if (weight.size() > 0) return 0.5 * residual.dot(weight * residual);
  return 0.5 * iso_weight * residual.squaredNorm();
}

Eigen::VectorXd FactorEval::weighted_residual() const {
  if (weight.size() > 0) return weight * residual;
  return iso_weight * residual;
}

FactorEval evaluate_factor(const FactorGraph& graph, const Factor& factor,
                           const Trajectory& trajectory, bool with_jacobians) {
  const int dim = graph.state_dim();
  FactorEval ev;
  ev.iso_weight = 1.0 / (factor.sigma * factor.sigma);

  const SupportState& s0 = trajectory[factor.key0];
  switch (factor.kind) {
    case FactorKind::kStartPrior:
    case FactorKind::kGoalPrior: {
      ev.residual = s0.flatten() - factor.target;
      if (with_jacobians) ev.jacobian0 = Eigen::MatrixXd::Identity(dim, dim);
      break;
    }
    case FactorKind::kGpPrior: {
      const SupportState& s1 = trajectory[factor.key1];
      const double dt = s1.time - s0.time;
      ev.residual = gp_prior_error(s0, s1);
      ev.weight = gp_cov_inverse(dt, graph.qc_scale, graph.num_robots);
      if (with_jacobians) {
        ev.jacobian0 = transition(dt, graph.num_robots);
        ev.jacobian1 = -Eigen::MatrixXd::Identity(dim, dim);
      }
      break;
    }
    case FactorKind::kObstacle: {
      ResidualJacobian rj = obstacle_residual(s0, *graph.sdf, graph.hinge.eps_obs);
      ev.residual = std::move(rj.residual);
      if (with_jacobians) ev.jacobian0 = std::move(rj.jacobian);
      break;
    }
    case FactorKind::kCollision: {
      ResidualJacobian rj = collision_residual(s0, graph.hinge.eps_col);
      ev.residual = std::move(rj.residual);
      if (with_jacobians) ev.jacobian0 = std::move(rj.jacobian);
      break;
    }
    case FactorKind::kFormation: {
      ResidualJacobian rj = formation_residual(s0, graph.formation_layouts[factor.formation_index],
                                               graph.hinge.eps_form);
      ev.residual = std::move(rj.residual);
      if (with_jacobians) ev.jacobian0 = std::move(rj.jacobian);
      break;
    }
    case FactorKind::kInterpObstacle:
    case FactorKind::kInterpCollision:
    case FactorKind::kInterpFormation: {
      const SupportState& s1 = trajectory[factor.key1];
      auto base = [&](const SupportState& s) -> ResidualJacobian {
        if (factor.kind == FactorKind::kInterpObstacle)
          return obstacle_residual(s, *graph.sdf, graph.hinge.eps_obs);
        if (factor.kind == FactorKind::kInterpCollision)
          return collision_residual(s, graph.hinge.eps_col);
        return formation_residual(s, graph.formation_layouts[factor.formation_index],
                                  graph.hinge.eps_form);
      };
      const InterpolatedResidual ir =
          interpolated_residual(s0, s1, factor.tau, graph.qc_scale, base);
      ev.residual = ir.residual;
      if (with_jacobians) {
        ev.jacobian0 = ir.jacobian_prev;
        ev.jacobian1 = ir.jacobian_next;
      }
      break;
    }
  }
  return ev;
}

double total_cost(const FactorGraph& graph, const Trajectory& trajectory) {
  if (static_cast<int>(trajectory.size()) != graph.num_states())
    throw std::invalid_argument("total_cost: trajectory length mismatch");
  for (const SupportState& s : trajectory)
    if (s.num_robots() != graph.num_robots)
      throw std::invalid_argument("total_cost: state dimension mismatch");
  double cost = 0.0;
  for (const Factor& f : graph.factors) cost += evaluate_factor(graph, f, trajectory, false).cost();
  return cost;
}

BlockTridiagonalSystem linearize(const FactorGraph& graph, const Trajectory& trajectory) {
  if (static_cast<int>(trajectory.size()) != graph.num_states())
    throw std::invalid_argument("linearize: trajectory length mismatch");
  const int dim = graph.state_dim();
  const int first = graph.first_free_state;
  const int nb = graph.num_states() - first;
  if (nb < 1) throw std::invalid_argument("linearize: no free states");

  BlockTridiagonalSystem sys;
  sys.first_state = first;
  sys.diag.assign(nb, Eigen::MatrixXd::Zero(dim, dim));
  sys.upper.assign(nb > 1 ? nb - 1 : 0, Eigen::MatrixXd::Zero(dim, dim));
  sys.gradient.assign(nb, Eigen::VectorXd::Zero(dim));

  for (const Factor& f : graph.factors) {
    const bool free0 = f.key0 >= first;
    const bool free1 = f.num_keys() == 2 && f.key1 >= first;
    if (!free0 && !free1) continue;
    const FactorEval ev = evaluate_factor(graph, f, trajectory, true);
    if (ev.residual.size() == 0) continue;
    const Eigen::VectorXd wr = ev.weighted_residual();

    const auto weighted = [&](const Eigen::MatrixXd& j) -> Eigen::MatrixXd {
      if (ev.weight.size() > 0) return ev.weight * j;
      return ev.iso_weight * j;
    };

    if (free0) {
      const int b = f.key0 - first;
      sys.diag[b].noalias() += ev.jacobian0.transpose() * weighted(ev.jacobian0);
      sys.gradient[b].noalias() += ev.jacobian0.transpose() * wr;
    }
    if (free1) {
      const int b = f.key1 - first;
      sys.diag[b].noalias() += ev.jacobian1.transpose() * weighted(ev.jacobian1);
      sys.gradient[b].noalias() += ev.jacobian1.transpose() * wr;
      if (free0) sys.upper[f.key0 - first].noalias() += ev.jacobian0.transpose() * weighted(ev.jacobian1);
    }
  }
  return sys;
}

bool solve_block_tridiagonal(const BlockTridiagonalSystem& system, double lambda,
                             const std::vector<Eigen::VectorXd>& rhs,
                             std::vector<Eigen::VectorXd>& solution) {
  const int nb = static_cast<int>(system.diag.size());
  std::vector<Eigen::LLT<Eigen::MatrixXd>> pivots(nb);
  std::vector<Eigen::MatrixXd> gain(nb > 1 ? nb - 1 : 0);
  std::vector<Eigen::VectorXd> carry(nb);

  Eigen::MatrixXd block;
  for (int b = 0; b < nb; ++b) {
    block = system.diag[b];
    if (lambda > 0.0) block.diagonal() += lambda * system.diag[b].diagonal();
    Eigen::VectorXd r = rhs[b];
    if (b > 0) {
      block.noalias() -= system.upper[b - 1].transpose() * gain[b - 1];
      r.noalias() -= system.upper[b - 1].transpose() * carry[b - 1];
    }
    pivots[b].compute(block);
    if (pivots[b].info() != Eigen::Success) return false;
    if (b + 1 < nb) gain[b] = pivots[b].solve(system.upper[b]);
    carry[b] = pivots[b].solve(r);
  }

  solution.assign(nb, Eigen::VectorXd());
  solution[nb - 1] = carry[nb - 1];
  for (int b = nb - 2; b >= 0; --b) solution[b] = carry[b] - gain[b] * solution[b + 1];
  return true;
}

namespace {

Trajectory apply_step(const FactorGraph& graph, const Trajectory& base,
                      const std::vector<Eigen::VectorXd>& delta) {
  Trajectory out = base;
  const int first = graph.first_free_state;
  for (size_t b = 0; b < delta.size(); ++b) {
    const int k = first + static_cast<int>(b);
    out[k] = SupportState::unflatten(base[k].time, base[k].flatten() + delta[b]);
  }
  return out;
}

double max_abs(const std::vector<Eigen::VectorXd>& vs) {
  double m = 0.0;
  for (const auto& v : vs) m = std::max(m, v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
  return m;
}

std::vector<double> flatten_all(const Trajectory& traj) {
  std::vector<double> out;
  for (const SupportState& s : traj) {
    const Eigen::VectorXd v = s.flatten();
    out.insert(out.end(), v.data(), v.data() + v.size());
  }
  return out;
}

}  // namespace

std::pair<Trajectory, SolveReport> solve(const FactorGraph& graph, const Trajectory& initial,
                                         const LmConfig& config) {
  graph.validate();
  const auto t_begin = std::chrono::steady_clock::now();

  Trajectory current = initial;
  double cost = total_cost(graph, current);
  if (!std::isfinite(cost))
    throw NumericFailureError("solve: non-finite cost at the initialization",
                              flatten_all(current));

  SolveReport report;
  report.initial_cost = cost;
  report.cost_trace.push_back(cost);
  double lambda = config.lambda_init;

  double state_scale = 1.0;
  for (const SupportState& s : current)
    state_scale = std::max(state_scale, s.flatten().cwiseAbs().maxCoeff());

  for (int it = 0; it < config.max_iterations; ++it) {
    const BlockTridiagonalSystem sys = linearize(graph, current);
    std::vector<Eigen::VectorXd> rhs(sys.gradient.size());
    for (size_t b = 0; b < rhs.size(); ++b) rhs[b] = -sys.gradient[b];

    bool accepted = false;
    bool stationary = false;
    while (true) {
      std::vector<Eigen::VectorXd> delta;
      const bool solved = solve_block_tridiagonal(sys, lambda, rhs, delta);
      if (solved) {
        if (max_abs(delta) <= config.step_tol * state_scale) {
          stationary = true;
          break;
        }
        double trial_cost = std::numeric_limits<double>::infinity();
        Trajectory trial;
        try {
          trial = apply_step(graph, current, delta);
          trial_cost = total_cost(graph, trial);
        } catch (const OutOfBoundsError&) {
          // Trial stepped off the map; treat as a rejected step.
        } catch (const std::invalid_argument&) {
          // Non-finite trial state; likewise rejected.
        }
        ++report.attempted_steps;
        if (std::isfinite(trial_cost) && trial_cost < cost) {
          const double decrease = (cost - trial_cost) / std::max(cost, 1e-300);
          current = std::move(trial);
          cost = trial_cost;
          report.cost_trace.push_back(cost);
          ++report.iterations;
          lambda = lambda / config.lambda_down < 1e-15 ? 0.0 : lambda / config.lambda_down;
          accepted = true;
          if (decrease < config.rel_tol || cost <= config.abs_tol) report.converged = true;
          break;
        }
      }
      lambda = lambda == 0.0 ? config.lambda_first : lambda * config.lambda_up;
      if (lambda > config.lambda_max) break;  // stalled
    }

    if (stationary) {
      report.converged = true;
      break;
    }
    if (!accepted) {
      // No damping admits a decrease: numerically at a local minimum.
      report.converged = true;
      break;
    }
    if (report.converged) break;
  }

  report.final_cost = cost;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return {std::move(current), std::move(report)};
}

}  // namespace gpform

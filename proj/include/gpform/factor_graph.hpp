#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "gpform/cost_factors.hpp"
#include "gpform/environment.hpp"
#include "gpform/formation.hpp"
#include "gpform/gp_model.hpp"

namespace gpform {

enum class FactorKind {
  kStartPrior,
  kGoalPrior,
  kGpPrior,
  kObstacle,
  kCollision,
  kFormation,
  kInterpObstacle,
  kInterpCollision,
  kInterpFormation,
};

bool is_interpolated(FactorKind kind);

/// One cost term. Priors and direct likelihood factors reference a single
/// support state, GP priors and interpolated factors two consecutive ones.
struct Factor {
  FactorKind kind;
  int key0 = -1;
  int key1 = -1;
  double tau = 0.0;            // interpolated kinds only
  double sigma = 1.0;          // isotropic weight = I / sigma^2
  int formation_index = -1;    // formation kinds: index into formation_layouts
  Eigen::VectorXd target;      // prior kinds

  int num_keys() const { return key1 >= 0 ? 2 : 1; }
};

using Trajectory = std::vector<SupportState>;

struct FactorGraph {
  std::vector<double> support_times;
  int num_robots = 0;
  double qc_scale = 1.0;
  HingeParams hinge;
  std::shared_ptr<const SignedDistanceGrid> sdf;
  std::vector<FormationLayout> formation_layouts;
  std::vector<Factor> factors;
  /// States below this index are constants of the optimization (used by the
  /// replanner to keep the already-executed prefix untouched).
  int first_free_state = 0;

  int num_states() const { return static_cast<int>(support_times.size()); }
  int state_dim() const { return 4 * num_robots; }
  void validate() const;
};

/// Inputs for assembling the graph of one mission.
struct GraphSpec {
  int num_robots = 1;
  std::vector<double> support_times;
  double qc_scale = 1.0;
  int n_ip = 4;  // interpolated factors per support interval
  HingeParams hinge;
  Eigen::Matrix2Xd start_positions;
  Eigen::Matrix2Xd goal_positions;
  double start_sigma = 1e-6;
  double goal_sigma = 1e-3;
  std::shared_ptr<const SignedDistanceGrid> sdf;

  struct Hold {
    FormationSpec formation;
    double t_start = 0.0;
    double t_end = 0.0;
  };
  std::vector<Hold> holds;
};

/// Assemble the factor graph and the constant-velocity straight-line
/// initialization. Formation factors appear only at support/interpolation
/// times that fall inside a hold interval.
std::pair<FactorGraph, Trajectory> build_graph(const GraphSpec& spec);

/// Raw residual, per-key Jacobians, and weight of one factor at the current
/// trajectory. An empty `weight` means the isotropic I / sigma^2.
struct FactorEval {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian0;
  Eigen::MatrixXd jacobian1;
  Eigen::MatrixXd weight;
  double iso_weight = 1.0;

  double cost() const;
  Eigen::VectorXd weighted_residual() const;
};

FactorEval evaluate_factor(const FactorGraph& graph, const Factor& factor,
                           const Trajectory& trajectory, bool with_jacobians);

/// Sum of 0.5 * r^T W r over all factors.
double total_cost(const FactorGraph& graph, const Trajectory& trajectory);

/// Normal equations in block-tridiagonal form over the free states:
/// hessian approximation J^T W J (diag + upper blocks) and gradient J^T W r.
struct BlockTridiagonalSystem {
  int first_state = 0;
  std::vector<Eigen::MatrixXd> diag;
  std::vector<Eigen::MatrixXd> upper;  // block (b, b+1)
  std::vector<Eigen::VectorXd> gradient;
};

BlockTridiagonalSystem linearize(const FactorGraph& graph, const Trajectory& trajectory);

/// Solve (H + lambda * diag(H)) x = rhs by block Cholesky elimination along
/// the chain. Returns false if a pivot block is not positive definite.
bool solve_block_tridiagonal(const BlockTridiagonalSystem& system, double lambda,
                             const std::vector<Eigen::VectorXd>& rhs,
                             std::vector<Eigen::VectorXd>& solution);

struct LmConfig {
  double lambda_init = 0.0;    // first trial is a pure Gauss-Newton step
  double lambda_first = 1e-4;  // first damped retry
  double lambda_up = 10.0;
  double lambda_down = 10.0;
  double lambda_max = 1e12;
  double rel_tol = 1e-5;
  double abs_tol = 1e-15;
  double step_tol = 1e-9;
  int max_iterations = 100;
};

struct SolveReport {
  int iterations = 0;  // accepted steps
  int attempted_steps = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  std::vector<double> cost_trace;  // initial cost followed by accepted costs
};

/// Levenberg-Marquardt over the free support states.
std::pair<Trajectory, SolveReport> solve(const FactorGraph& graph, const Trajectory& initial,
                                         const LmConfig& config = {});

}  // namespace gpform

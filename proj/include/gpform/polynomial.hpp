#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gpform/factor_graph.hpp"

namespace gpform {

/// Degree-7 piecewise polynomial per robot. Coefficients are stored in
/// normalized segment time s = (t - t0) / (t1 - t0), ascending power.
struct PiecewisePolynomial {
  struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    Eigen::Matrix<double, 8, 2> coeffs;  // columns: x, y
  };
  std::vector<std::vector<Segment>> robots;

  Eigen::Vector2d position(int robot, double t) const;
  Eigen::Vector2d velocity(int robot, double t) const;
};

/// Minimum-snap fit through the optimized trajectory: position and velocity
/// are pinned to the GP trajectory at every boundary, acceleration and jerk
/// stay continuous across interior boundaries, and the integrated squared
/// snap is minimized (closed-form KKT solve). Throws NumericFailureError if
/// the KKT system is singular.
PiecewisePolynomial fit_polynomials(const FactorGraph& graph, const Trajectory& solution,
                                    const std::vector<double>& boundaries);

/// Boundary times for the bundled export: mission start/end, every hold
/// boundary, and every support time, deduplicated and sorted.
std::vector<double> polynomial_boundaries(const std::vector<double>& support_times,
                                          const std::vector<std::pair<double, double>>& holds);

}  // namespace gpform

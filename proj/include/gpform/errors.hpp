#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gpform {

/// Query point left the mapped workspace.
class OutOfBoundsError : public std::out_of_range {
 public:
  explicit OutOfBoundsError(const std::string& what) : std::out_of_range(what) {}
};

/// The global planner could not produce a feasible corridor/schedule.
class PlanningInfeasibleError : public std::runtime_error {
 public:
  explicit PlanningInfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// The optimizer hit a non-finite cost. Carries the last finite iterate so
/// callers can inspect how far the solve got.
class NumericFailureError : public std::runtime_error {
 public:
  NumericFailureError(const std::string& what, std::vector<double> last_finite)
      : std::runtime_error(what), last_finite_iterate(std::move(last_finite)) {}

  std::vector<double> last_finite_iterate;
};

}  // namespace gpform

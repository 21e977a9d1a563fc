#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gpform {

/// Robot-to-slot assignment for one rectangular formation. slot_to_robot is
/// row-major over the rows x cols grid; entries >= num_real are virtual
/// padding (rendered as -1 in reports).
struct AssignmentMatrix {
  int rows = 0;
  int cols = 0;
  int num_real = 0;
  std::vector<int> slot_to_robot;

  AssignmentMatrix() = default;
  AssignmentMatrix(int rows_, int cols_, int num_real_);

  int at(int r, int c) const { return slot_to_robot[static_cast<size_t>(r) * cols + c]; }
  int& at(int r, int c) { return slot_to_robot[static_cast<size_t>(r) * cols + c]; }
  int num_slots() const { return rows * cols; }
  bool is_virtual(int robot_id) const { return robot_id >= num_real; }

  /// Row-major identity: robot k in slot k, virtuals in the tail slots.
  static AssignmentMatrix identity(int rows, int cols, int num_real);

  /// (row, col) of a real robot; throws if absent.
  std::pair<int, int> slot_of(int robot_id) const;

  void validate() const;  // bijection over real + virtual ids
};

/// Rectangular formation geometry: slot (r, c) sits at
/// anchor + R(heading) * (c * spacing, -r * spacing), the origin slot (0, 0)
/// being the upper-left corner.
struct FormationSpec {
  int rows = 1;
  int cols = 1;
  double spacing = 0.5;  // d0, meters
  double heading = 0.0;  // radians
  AssignmentMatrix assignment;

  int num_slots() const { return rows * cols; }
  /// Along-track extent (cols - 1) * spacing.
  double length() const { return (cols - 1) * spacing; }
  /// Across-track extent (rows - 1) * spacing.
  double breadth() const { return (rows - 1) * spacing; }
};

}  // namespace gpform

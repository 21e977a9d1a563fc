#pragma once

#include "gpform/formation.hpp"

namespace gpform {

/// Diagonal-cut transition between two rectangular formations. The previous
/// formation is cut along anti-diagonals from the top; each cut is queued in
/// ascending column order and written into the new matrix row by row, with
/// the tail of an overflowing cut finishing the current row before the head
/// starts the next one. Transitions that shrink the column count run the
/// inverse of that procedure. Virtual robots take part in the cutting but are
/// skipped when filling and end up in the leftover slots.
AssignmentMatrix assign_transition(const AssignmentMatrix& old_assignment, int new_rows,
                                   int new_cols);

/// World-frame goal of every real robot when the origin slot (0, 0) sits at
/// `anchor`. Virtual slots produce no goal.
Eigen::Matrix2Xd goals_from_assignment(const AssignmentMatrix& assignment, double spacing,
                                       const Eigen::Vector2d& anchor, double heading);

/// Same grid but with the formation centroid at `center` instead of the
/// origin slot.
Eigen::Matrix2Xd goals_centered(const AssignmentMatrix& assignment, double spacing,
                                const Eigen::Vector2d& center, double heading);

}  // namespace gpform

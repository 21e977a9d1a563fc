#include "gpform/task_assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gpform {

AssignmentMatrix::AssignmentMatrix(int rows_, int cols_, int num_real_)
    : rows(rows_), cols(cols_), num_real(num_real_) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("assignment dims must be positive");
  if (num_real < 1 || num_real > rows * cols)
    throw std::invalid_argument("robot count must be in [1, rows*cols]");
  slot_to_robot.assign(static_cast<size_t>(rows) * cols, -1);
}

AssignmentMatrix AssignmentMatrix::identity(int rows, int cols, int num_real) {
  AssignmentMatrix a(rows, cols, num_real);
  for (int i = 0; i < rows * cols; ++i) a.slot_to_robot[i] = i;
  return a;
}

std::pair<int, int> AssignmentMatrix::slot_of(int robot_id) const {
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (at(r, c) == robot_id) return {r, c};
  throw std::invalid_argument("robot has no slot in this assignment");
}

void AssignmentMatrix::validate() const {
  std::vector<int> seen(num_slots(), 0);
  for (int id : slot_to_robot) {
    if (id < 0 || id >= num_slots()) throw std::invalid_argument("assignment id out of range");
    if (seen[id]++) throw std::invalid_argument("assignment id repeated");
  }
}

namespace {

// Slots of a rows x cols grid in cut-traversal order: anti-diagonals
// d = row + col from the top, ascending column inside each cut.
std::vector<std::pair<int, int>> cut_traversal(int rows, int cols) {
  std::vector<std::pair<int, int>> order;
  order.reserve(static_cast<size_t>(rows) * cols);
  for (int d = 0; d <= rows - 1 + cols - 1; ++d) {
    for (int c = std::max(0, d - rows + 1); c <= std::min(d, cols - 1); ++c)
      order.emplace_back(d - c, c);
  }
  return order;
}

// Write cut queues into a rows x cols grid row by row. An overflowing cut
// donates its tail to the current row and restarts with its head on the
// next row. Returns the row-major grid, -1 in untouched slots.
std::vector<int> fill_by_rows(const std::vector<std::vector<int>>& queues, int rows, int cols) {
  std::vector<int> grid(static_cast<size_t>(rows) * cols, -1);
  int row = 0, col = 0;
  auto place = [&](int value) {
    grid[static_cast<size_t>(row) * cols + col] = value;
    if (++col == cols) {
      ++row;
      col = 0;
    }
  };
  for (const auto& q : queues) {
    const int m = static_cast<int>(q.size());
    if (m == 0) continue;
    const int rem = cols - col;
    if (row >= rows) throw std::invalid_argument("assignment fill overflow");
    if (m <= rem) {
      for (int v : q) place(v);
    } else {
      for (int i = m - rem; i < m; ++i) place(q[i]);  // tail finishes this row
      for (int i = 0; i < m - rem; ++i) place(q[i]);  // head opens the next
    }
  }
  return grid;
}

// Queue contents of `a` in cut order, virtual occupants dropped.
std::vector<std::vector<int>> real_cut_queues(const AssignmentMatrix& a) {
  std::vector<std::vector<int>> queues;
  for (int d = 0; d <= a.rows - 1 + a.cols - 1; ++d) {
    std::vector<int> q;
    for (int c = std::max(0, d - a.rows + 1); c <= std::min(d, a.cols - 1); ++c) {
      const int id = a.at(d - c, c);
      if (!a.is_virtual(id)) q.push_back(id);
    }
    queues.push_back(std::move(q));
  }
  return queues;
}

void pad_with_virtuals(AssignmentMatrix& a) {
  int next_virtual = a.num_real;
  for (int& id : a.slot_to_robot)
    if (id == -1) id = next_virtual++;
}

AssignmentMatrix forward_transition(const AssignmentMatrix& old_a, int new_rows, int new_cols) {
  AssignmentMatrix out(new_rows, new_cols, old_a.num_real);
  out.slot_to_robot = fill_by_rows(real_cut_queues(old_a), new_rows, new_cols);
  pad_with_virtuals(out);
  return out;
}

AssignmentMatrix inverse_transition(const AssignmentMatrix& old_a, int new_rows, int new_cols) {
  const int n = old_a.num_real;
  // Conceptual forward pass from the new dims back to the old dims. Its
  // virtual slots are, by convention, the tail of the cut traversal, so the
  // first n traversal slots hold the real placeholders.
  const auto beta = cut_traversal(new_rows, new_cols);
  std::vector<std::vector<int>> queues;
  {
    int j = 0;
    for (int d = 0; d <= new_rows - 1 + new_cols - 1; ++d) {
      std::vector<int> q;
      const int lo = std::max(0, d - new_rows + 1), hi = std::min(d, new_cols - 1);
      for (int c = lo; c <= hi; ++c, ++j)
        if (j < n) q.push_back(j);
      queues.push_back(std::move(q));
    }
  }
  const std::vector<int> placed = fill_by_rows(queues, old_a.rows, old_a.cols);

  AssignmentMatrix out(new_rows, new_cols, n);
  std::vector<uint8_t> used(static_cast<size_t>(old_a.rows) * old_a.cols, 0);
  for (size_t slot = 0; slot < placed.size(); ++slot) {
    const int j = placed[slot];
    if (j < 0) continue;
    const int occupant = old_a.slot_to_robot[slot];
    used[slot] = 1;
    if (!old_a.is_virtual(occupant))
      out.at(beta[j].first, beta[j].second) = occupant;
  }
  // Reals whose old slot the conceptual pass treated as virtual padding go
  // into the remaining traversal slots, then virtual ids close the grid.
  std::vector<int> leftovers;
  for (size_t slot = 0; slot < used.size(); ++slot)
    if (!used[slot] && !old_a.is_virtual(old_a.slot_to_robot[slot]))
      leftovers.push_back(old_a.slot_to_robot[slot]);
  size_t next = 0;
  for (const auto& [r, c] : beta) {
    if (out.at(r, c) != -1) continue;
    if (next < leftovers.size())
      out.at(r, c) = leftovers[next++];
  }
  pad_with_virtuals(out);
  return out;
}

}  // namespace

AssignmentMatrix assign_transition(const AssignmentMatrix& old_assignment, int new_rows,
                                   int new_cols) {
  old_assignment.validate();
  if (new_rows < 1 || new_cols < 1)
    throw std::invalid_argument("assign_transition: dims must be positive");
  if (old_assignment.num_real > new_rows * new_cols)
    throw std::invalid_argument("assign_transition: new formation too small for the team");

  if (new_rows == old_assignment.rows && new_cols == old_assignment.cols)
    return old_assignment;

  AssignmentMatrix out = (new_cols >= old_assignment.cols)
                             ? forward_transition(old_assignment, new_rows, new_cols)
                             : inverse_transition(old_assignment, new_rows, new_cols);
  out.validate();
  return out;
}

Eigen::Matrix2Xd goals_from_assignment(const AssignmentMatrix& assignment, double spacing,
                                       const Eigen::Vector2d& anchor, double heading) {
  if (spacing <= 0.0) throw std::invalid_argument("goals_from_assignment: spacing must be positive");
  const double ch = std::cos(heading), sh = std::sin(heading);
  Eigen::Matrix2Xd goals(2, assignment.num_real);
  for (int r = 0; r < assignment.rows; ++r) {
    for (int c = 0; c < assignment.cols; ++c) {
      const int id = assignment.at(r, c);
      if (assignment.is_virtual(id)) continue;
      const Eigen::Vector2d local(c * spacing, -r * spacing);
      goals.col(id) = anchor + Eigen::Vector2d(ch * local.x() - sh * local.y(),
                                               sh * local.x() + ch * local.y());
    }
  }
  return goals;
}

Eigen::Matrix2Xd goals_centered(const AssignmentMatrix& assignment, double spacing,
                                const Eigen::Vector2d& center, double heading) {
  const double ch = std::cos(heading), sh = std::sin(heading);
  const Eigen::Vector2d local_centroid(0.5 * (assignment.cols - 1) * spacing,
                                       -0.5 * (assignment.rows - 1) * spacing);
  const Eigen::Vector2d anchor =
      center - Eigen::Vector2d(ch * local_centroid.x() - sh * local_centroid.y(),
                               sh * local_centroid.x() + ch * local_centroid.y());
  return goals_from_assignment(assignment, spacing, anchor, heading);
}

}  // namespace gpform

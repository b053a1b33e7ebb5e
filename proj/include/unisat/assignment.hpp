#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

namespace unisat {

// Cost value treated as "forbidden". Large enough to dominate any feasible
// log-likelihood cost, small enough that double arithmetic keeps feasible
// cost differences intact.
inline constexpr double kForbiddenCost = 1e9;

namespace detail {

// Kuhn-Munkres / Jonker-Volgenant shortest augmenting path on a square
// matrix. Returns row -> col.
inline std::vector<int> hungarian_square(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace detail

struct AssignmentResult {
  std::vector<int> row_to_col;  // -1 for unassigned rows (rows beyond min(n,m))
  double cost = 0.0;
  bool feasible = true;
};

// Minimum-cost assignment of min(n, m) pairs on a rectangular matrix.
// Entries >= kForbiddenCost/2 are treated as forbidden. Ties between optimal
// assignments are resolved toward lexicographically smallest pair order.
inline AssignmentResult solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (n == 0 || m == 0) return {std::vector<int>(static_cast<std::size_t>(n), -1), 0.0, true};
  if (n > m) {
    const AssignmentResult t = solve_assignment(cost.transpose());
    AssignmentResult out;
    out.row_to_col.assign(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < m; ++j) {
      if (t.row_to_col[static_cast<std::size_t>(j)] >= 0) out.row_to_col[static_cast<std::size_t>(t.row_to_col[static_cast<std::size_t>(j)])] = j;
    }
    out.cost = t.cost;
    out.feasible = t.feasible;
    return out;
  }
  // n <= m: pad with zero-cost dummy rows that absorb the extra columns.
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(m, m);
  sq.topRows(n) = cost;
  std::vector<int> assign = detail::hungarian_square(sq);
  assign.resize(static_cast<std::size_t>(n));

  // Lexicographic polish: swap assignment pairs when cost is unchanged and
  // the pair list gets lexicographically smaller.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int ci = assign[static_cast<std::size_t>(i)], cj = assign[static_cast<std::size_t>(j)];
        if (cj < ci && cost(i, cj) + cost(j, ci) == cost(i, ci) + cost(j, cj)) {
          std::swap(assign[static_cast<std::size_t>(i)], assign[static_cast<std::size_t>(j)]);
          changed = true;
        }
      }
    }
  }

  AssignmentResult out;
  out.row_to_col = assign;
  for (int i = 0; i < n; ++i) {
    const double c = cost(i, assign[static_cast<std::size_t>(i)]);
    out.cost += c;
    if (c >= kForbiddenCost / 2) out.feasible = false;
  }
  return out;
}

// K best assignments in ascending cost order (Murty's partition scheme).
// Every row must be assigned; columns may stay free. Enumeration stops once
// a solution's cost exceeds best + max_cost_gap.
inline std::vector<AssignmentResult> murty_kbest(const Eigen::MatrixXd& cost, int k,
                                                 double max_cost_gap = 40.0) {
  const int n = static_cast<int>(cost.rows());
  std::vector<AssignmentResult> out;
  if (n == 0) {
    out.push_back({{}, 0.0, true});
    return out;
  }
  if (k <= 0) return out;

  struct Node {
    Eigen::MatrixXd cost;          // working matrix with bans applied
    std::vector<int> forced;       // forced[r] = col or -1
    AssignmentResult solution;     // solution over non-forced rows, full-size indices
    double total = 0.0;
    std::uint64_t seq = 0;
  };
  struct NodeCmp {
    bool operator()(const Node& a, const Node& b) const {
      if (a.total != b.total) return a.total > b.total;
      return a.seq > b.seq;
    }
  };

  auto solve_node = [&](Node& node) -> bool {
    std::vector<int> free_rows;
    double forced_cost = 0.0;
    for (int r = 0; r < n; ++r) {
      if (node.forced[static_cast<std::size_t>(r)] >= 0) {
        forced_cost += cost(r, node.forced[static_cast<std::size_t>(r)]);
      } else {
        free_rows.push_back(r);
      }
    }
    AssignmentResult full;
    full.row_to_col.assign(static_cast<std::size_t>(n), -1);
    for (int r = 0; r < n; ++r) full.row_to_col[static_cast<std::size_t>(r)] = node.forced[static_cast<std::size_t>(r)];
    if (!free_rows.empty()) {
      Eigen::MatrixXd sub(static_cast<Eigen::Index>(free_rows.size()), node.cost.cols());
      for (std::size_t i = 0; i < free_rows.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = node.cost.row(free_rows[i]);
      const AssignmentResult r = solve_assignment(sub);
      if (!r.feasible) return false;
      for (std::size_t i = 0; i < free_rows.size(); ++i) {
        full.row_to_col[static_cast<std::size_t>(free_rows[i])] = r.row_to_col[i];
      }
      full.cost = r.cost;
    }
    node.solution = full;
    node.total = forced_cost + full.cost;
    return node.total < kForbiddenCost / 2;
  };

  std::priority_queue<Node, std::vector<Node>, NodeCmp> heap;
  std::uint64_t seq = 0;

  Node root;
  root.cost = cost;
  // Forced columns must be masked out for the remaining rows.
  root.forced.assign(static_cast<std::size_t>(n), -1);
  if (solve_node(root)) {
    root.seq = seq++;
    heap.push(std::move(root));
  }

  double best = std::numeric_limits<double>::infinity();
  while (!heap.empty() && static_cast<int>(out.size()) < k) {
    Node node = heap.top();
    heap.pop();
    if (out.empty()) best = node.total;
    if (node.total > best + max_cost_gap) break;
    AssignmentResult sol = node.solution;
    sol.cost = node.total;
    out.push_back(sol);

    // Partition on the free rows of this node.
    std::vector<int> free_rows;
    for (int r = 0; r < n; ++r) {
      if (node.forced[static_cast<std::size_t>(r)] < 0) free_rows.push_back(r);
    }
    for (std::size_t i = 0; i < free_rows.size(); ++i) {
      const int r = free_rows[i];
      const int banned_col = node.solution.row_to_col[static_cast<std::size_t>(r)];
      Node child;
      child.cost = node.cost;
      child.forced = node.forced;
      // Rows before i keep their solution pairing fixed.
      for (std::size_t j = 0; j < i; ++j) {
        const int fr = free_rows[j];
        const int fc = node.solution.row_to_col[static_cast<std::size_t>(fr)];
        child.forced[static_cast<std::size_t>(fr)] = fc;
        child.cost.col(fc).setConstant(kForbiddenCost);
      }
      child.cost(r, banned_col) = kForbiddenCost;
      if (solve_node(child)) {
        child.seq = seq++;
        heap.push(std::move(child));
      }
    }
  }
  return out;
}

}  // namespace unisat

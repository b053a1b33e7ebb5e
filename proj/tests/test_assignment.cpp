#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "unisat/assignment.hpp"
#include "unisat/rng.hpp"

using namespace unisat;

namespace {

// Exhaustive minimum over permutations (rows <= cols).
double brute_force_min_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  std::vector<int> cols(static_cast<std::size_t>(m));
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += cost(i, cols[static_cast<std::size_t>(i)]);
    best = std::min(best, c);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

// All full-row assignments with costs, ascending.
std::vector<double> brute_force_all_costs(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  std::vector<double> out;
  std::vector<int> chosen;
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  std::function<void(int, double)> rec = [&](int row, double acc) {
    if (row == n) {
      if (acc < kForbiddenCost / 2) out.push_back(acc);
      return;
    }
    for (int j = 0; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      used[static_cast<std::size_t>(j)] = 1;
      rec(row + 1, acc + cost(row, j));
      used[static_cast<std::size_t>(j)] = 0;
    }
  };
  rec(0, 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Assignment, ZeroDiagonal) {
  Eigen::MatrixXd cost(3, 3);
  cost << 0, 5, 5, 5, 0, 5, 5, 5, 0;
  const AssignmentResult r = solve_assignment(cost);
  EXPECT_EQ(r.row_to_col, (std::vector<int>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(r.cost, 0.0);
}

TEST(Assignment, OneByOne) {
  Eigen::MatrixXd cost(1, 1);
  cost << 7;
  const AssignmentResult r = solve_assignment(cost);
  EXPECT_EQ(r.row_to_col, (std::vector<int>{0}));
  EXPECT_DOUBLE_EQ(r.cost, 7.0);
}

TEST(Assignment, FiveByFiveMatchesBruteForce) {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd cost(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) cost(i, j) = rng.uniform(0.0, 10.0);
    }
    EXPECT_NEAR(solve_assignment(cost).cost, brute_force_min_cost(cost), 1e-9);
  }
}

TEST(Assignment, RectangularMatchesBruteForce) {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(4));
    const int m = n + static_cast<int>(rng.uniform_int(3));
    Eigen::MatrixXd cost(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) cost(i, j) = rng.uniform(0.0, 10.0);
    }
    EXPECT_NEAR(solve_assignment(cost).cost, brute_force_min_cost(cost), 1e-9);
    // Transposed problem (more rows than columns).
    const AssignmentResult t = solve_assignment(cost.transpose());
    EXPECT_NEAR(t.cost, brute_force_min_cost(cost), 1e-9);
    int assigned = 0;
    for (int v : t.row_to_col) assigned += v >= 0 ? 1 : 0;
    EXPECT_EQ(assigned, n);
  }
}

TEST(Murty, RankedEnumerationMatchesBruteForce) {
  Rng rng(44);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(3));
    const int m = n + 1 + static_cast<int>(rng.uniform_int(3));
    Eigen::MatrixXd cost(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) cost(i, j) = rng.uniform(0.0, 8.0);
    }
    const auto expected = brute_force_all_costs(cost);
    const int k = std::min<int>(10, static_cast<int>(expected.size()));
    const auto got = murty_kbest(cost, k, 1e9);
    ASSERT_EQ(static_cast<int>(got.size()), k);
    for (int i = 0; i < k; ++i) {
      EXPECT_NEAR(got[static_cast<std::size_t>(i)].cost, expected[static_cast<std::size_t>(i)], 1e-9);
      // Assignments must be 1-1 on columns.
      std::set<int> used;
      for (int c : got[static_cast<std::size_t>(i)].row_to_col) {
        ASSERT_GE(c, 0);
        ASSERT_TRUE(used.insert(c).second);
      }
    }
  }
}

TEST(Murty, ExhaustsAllAssignments) {
  Eigen::MatrixXd cost(2, 3);
  cost << 1, 2, 3, 4, 5, 6;
  const auto all = murty_kbest(cost, 100, 1e9);
  EXPECT_EQ(all.size(), 6u);  // 3 * 2 permutations
  const auto expected = brute_force_all_costs(cost);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_NEAR(all[i].cost, expected[i], 1e-12);
}

TEST(Murty, RespectsForbiddenEntries) {
  Eigen::MatrixXd cost(2, 2);
  cost << 1.0, kForbiddenCost, kForbiddenCost, 2.0;
  const auto sols = murty_kbest(cost, 10, 1e9);
  ASSERT_EQ(sols.size(), 1u);  // only the diagonal is feasible
  EXPECT_EQ(sols[0].row_to_col, (std::vector<int>{0, 1}));
}

TEST(Murty, CostGapTruncation) {
  Eigen::MatrixXd cost(1, 3);
  cost << 0.0, 1.0, 100.0;
  const auto sols = murty_kbest(cost, 10, 40.0);
  EXPECT_EQ(sols.size(), 2u);  // the 100-cost branch is beyond the gap
}

TEST(Murty, EmptyProblemSingleSolution) {
  Eigen::MatrixXd cost(0, 0);
  const auto sols = murty_kbest(cost, 5);
  ASSERT_EQ(sols.size(), 1u);
  EXPECT_DOUBLE_EQ(sols[0].cost, 0.0);
}

#include <doctest.h>

#include <Eigen/Dense>
#include <set>

#include "crowdpose3d/lap.hpp"
#include "test_util.hpp"

using namespace cp3d;

namespace {

std::set<std::pair<int, int>> pair_set(const Assignment& a) {
  std::set<std::pair<int, int>> s;
  for (const auto& p : a.pairs) s.insert({p.l, p.m});
  return s;
}

}  // namespace

TEST_CASE("solve_lap: zero diagonal wins") {
  Eigen::MatrixXd cost = Eigen::MatrixXd::Ones(3, 3);
  cost.diagonal().setZero();
  const Assignment a = solve_lap(cost);
  CHECK(pair_set(a) == std::set<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}});
  CHECK(a.total_cost() == doctest::Approx(0.0));
  CHECK(a.unmatched_a.empty());
  CHECK(a.unmatched_b.empty());
}

TEST_CASE("solve_lap: 1x1") {
  Eigen::MatrixXd cost(1, 1);
  cost << 7.5;
  const Assignment a = solve_lap(cost);
  REQUIRE(a.pairs.size() == 1);
  CHECK(a.pairs[0].l == 0);
  CHECK(a.pairs[0].m == 0);
  CHECK(a.total_cost() == doctest::Approx(7.5));
}

TEST_CASE("solve_lap: invalid entries raise") {
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(2, 2);
  cost(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_lap(cost), InvalidCost);
  cost(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(solve_lap(cost), InvalidCost);
}

TEST_CASE("solve_lap: equals brute force on random square matrices") {
  auto g = testutil::rng(57);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(testutil::uniform(g, 0, 7.999));
    const Eigen::MatrixXd cost = testutil::random_matrix(g, n, n);
    const Assignment a = solve_lap(cost);
    CHECK(static_cast<int>(a.pairs.size()) == n);
    CHECK(a.total_cost() ==
          doctest::Approx(testutil::brute_force_lap(cost)).epsilon(1e-12));
  }
}

TEST_CASE("solve_lap: equals brute force on rectangular matrices") {
  auto g = testutil::rng(58);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + static_cast<int>(testutil::uniform(g, 0, 6.999));
    int m = 1 + static_cast<int>(testutil::uniform(g, 0, 6.999));
    if (n == m) m = n + 1;
    const Eigen::MatrixXd cost = testutil::random_matrix(g, n, m);
    const Assignment a = solve_lap(cost);
    CHECK(static_cast<int>(a.pairs.size()) == std::min(n, m));
    CHECK(static_cast<int>(a.unmatched_a.size()) == n - std::min(n, m));
    CHECK(static_cast<int>(a.unmatched_b.size()) == m - std::min(n, m));
    CHECK(a.total_cost() ==
          doctest::Approx(testutil::brute_force_lap(cost)).epsilon(1e-12));
  }
}

TEST_CASE("solve_lap: 5x8 rectangular example shape") {
  auto g = testutil::rng(59);
  const Eigen::MatrixXd cost = testutil::random_matrix(g, 5, 8);
  const Assignment a = solve_lap(cost);
  CHECK(a.pairs.size() == 5);
  CHECK(a.unmatched_a.empty());
  CHECK(a.unmatched_b.size() == 3);
  CHECK(a.total_cost() == doctest::Approx(testutil::brute_force_lap(cost)));
}

TEST_CASE("solve_lap: assignment invariant to row/column constant shifts") {
  auto g = testutil::rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(testutil::uniform(g, 0, 5.999));
    const Eigen::MatrixXd cost = testutil::random_matrix(g, n, n);
    const Assignment base = solve_lap(cost);

    Eigen::MatrixXd shifted = cost;
    const int row = static_cast<int>(testutil::uniform(g, 0, n - 1e-9));
    const int col = static_cast<int>(testutil::uniform(g, 0, n - 1e-9));
    shifted.row(row).array() += testutil::uniform(g, -5, 5);
    shifted.col(col).array() += testutil::uniform(g, -5, 5);
    const Assignment moved = solve_lap(shifted);
    CHECK(pair_set(base) == pair_set(moved));
  }
}

TEST_CASE("solve_lap: row shifts never change rectangular assignments (rows saturated)") {
  auto g = testutil::rng(62);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd cost = testutil::random_matrix(g, 4, 7);
    const Assignment base = solve_lap(cost);
    Eigen::MatrixXd shifted = cost;
    shifted.row(2).array() += 100.0;
    CHECK(pair_set(solve_lap(shifted)) == pair_set(base));
  }
}

TEST_CASE("solve_lap: Hungarian fallback agrees with Jonker-Volgenant") {
  auto g = testutil::rng(63);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(testutil::uniform(g, 0, 8.999));
    const int m = 1 + static_cast<int>(testutil::uniform(g, 0, 8.999));
    const Eigen::MatrixXd cost = testutil::random_matrix(g, n, m);
    const Assignment jv = solve_lap(cost, LapAlgorithm::kJonkerVolgenant);
    const Assignment hung = solve_lap(cost, LapAlgorithm::kHungarian);
    CHECK(jv.total_cost() == doctest::Approx(hung.total_cost()).epsilon(1e-12));
  }
}

#pragma once

#include <Eigen/Core>
#include <vector>

#include "crowdpose3d/errors.hpp"

namespace cp3d {

/// One matched edge of an assignment: row index l, column index m, edge cost.
struct AssignedPair {
  int l = -1;
  int m = -1;
  double cost = 0.0;
};

/// A one-to-one assignment between two index sets. When produced by
/// match_pair, l/m are detection indices within view_a/view_b.
struct Assignment {
  int view_a = -1;
  int view_b = -1;
  std::vector<AssignedPair> pairs;
  std::vector<int> unmatched_a;
  std::vector<int> unmatched_b;

  double total_cost() const;
};

enum class LapAlgorithm {
  kJonkerVolgenant,  // column reduction + shortest augmenting paths, O(n^3)
  kHungarian,        // potential-based Kuhn-Munkres, O(n^3); differential testing
};

/// Minimum-total-cost one-to-one assignment of min(rows, cols) pairs.
/// Rectangular instances are padded with dummy rows/columns at
/// 10 x the largest finite cost; pairs involving dummies are reported
/// as unmatched. Throws InvalidCost on NaN or infinite entries.
Assignment solve_lap(const Eigen::MatrixXd& cost,
                     LapAlgorithm algorithm = LapAlgorithm::kJonkerVolgenant);

}  // namespace cp3d

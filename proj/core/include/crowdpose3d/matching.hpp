#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "crowdpose3d/detection.hpp"
#include "crowdpose3d/homography.hpp"
#include "crowdpose3d/lap.hpp"
#include "crowdpose3d/skeleton.hpp"

namespace cp3d {

/// A detected pair of feet, anchored on the rectified ground plane.
/// `anchor` is the midpoint of the rectified heels, `stride` the vector
/// from rectified left heel to rectified right heel.
struct FootPair {
  int view = 0;
  int index = 0;        // detection index within the view
  Point2 left = Point2::Zero();    // left heel, pixels
  Point2 right = Point2::Zero();   // right heel, pixels
  Point2 anchor = Point2::Zero();  // rectified ground plane
  Eigen::Vector2d stride = Eigen::Vector2d::Zero();
};

/// Weights of the edge cost terms: foot location, stride size,
/// stride direction.
struct EdgeWeights {
  double k1 = 1.0;  // per rectified unit
  double k2 = 1.0;
  double k3 = 0.5;
};

/// Complete bipartite feet graph between two views, as its cost matrix.
struct BipartiteGraph {
  int view_a = 0;
  int view_b = 0;
  Eigen::MatrixXd cost;  // a_j x a_k, finite and >= 0
};

/// Cross-view person hypotheses: each person maps view -> detection index.
struct PersonTrackSet {
  std::vector<std::map<int, int>> persons;

  /// Throws std::logic_error when a detection appears twice.
  void validate() const;
};

/// Strides shorter than this have no reliable size or direction; the k2/k3
/// terms are dropped for them.
inline constexpr double kStrideEps = 1e-6;

/// Edge cost between two foot pairs:
///   k1 * |p_a - H p_b| + k2 * ||v_a| - |v_b|| + k3 * |sin theta(v_a, v_b)|
/// where h maps fp_b's rectified frame into fp_a's (identity when both were
/// rectified into one common frame). Throws ViewMismatch when h's endpoints
/// disagree with the foot pairs' views.
double edge_cost(const FootPair& fp_a, const FootPair& fp_b,
                 const GroundHomography& h, const EdgeWeights& weights);

/// The complete bipartite graph of edge costs for a view pair.
BipartiteGraph build_bipartite_graph(const std::vector<FootPair>& view_a_feet,
                                     const std::vector<FootPair>& view_b_feet,
                                     const GroundHomography& h,
                                     const EdgeWeights& weights);

/// Assignment between two views' feet: LAP on the bipartite graph, then
/// matched pairs costlier than `gate` are dropped back to unmatched.
/// Reported l/m indices are detection indices (FootPair::index).
Assignment match_pair(const std::vector<FootPair>& view_a_feet,
                      const std::vector<FootPair>& view_b_feet,
                      const GroundHomography& h, const EdgeWeights& weights,
                      double gate,
                      LapAlgorithm algorithm = LapAlgorithm::kJonkerVolgenant);

/// Merges pairwise assignments over a ring of views (1->2->...->n->1; a
/// single assignment for n = 2) into cycle-consistent person hypotheses.
/// Chains that fail to close are broken greedily, keeping lower-cost edges
/// first. Every detection mentioned by the assignments ends up in exactly
/// one person. Throws RingTopologyError when the input is not a ring.
PersonTrackSet merge_multiview(const std::vector<Assignment>& pairwise);

/// Builds the foot pair of a detection, rectifying both heels through
/// h_to_ref (from the detection's view into the common ground frame).
/// Throws MissingFeet when a heel is absent or below min_confidence, and
/// ViewMismatch when h_to_ref does not start at the detection's view.
FootPair extract_foot_pairs(const Detection2D& det, const SkeletonSchema& schema,
                            const GroundHomography& h_to_ref,
                            double min_confidence = 0.05);

}  // namespace cp3d

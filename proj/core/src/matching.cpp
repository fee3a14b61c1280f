#include "crowdpose3d/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cp3d {

void PersonTrackSet::validate() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& person : persons)
    for (const auto& [view, det] : person)
      if (!seen.insert({view, det}).second)
        throw std::logic_error("person track set reuses a detection");
}

double edge_cost(const FootPair& fp_a, const FootPair& fp_b,
                 const GroundHomography& h, const EdgeWeights& weights) {
  if (h.from_view != fp_b.view || h.to_view != fp_a.view)
    throw ViewMismatch("edge_cost: homography endpoints do not match views");
  if (weights.k1 < 0.0 || weights.k2 < 0.0 || weights.k3 < 0.0)
    throw std::invalid_argument("edge_cost: weights must be >= 0");

  const Point2 pb = rectify(h, fp_b.anchor);
  double cost = weights.k1 * (fp_a.anchor - pb).norm();

  const double na = fp_a.stride.norm();
  const double nb = fp_b.stride.norm();
  if (na >= kStrideEps && nb >= kStrideEps) {
    cost += weights.k2 * std::abs(na - nb);
    const double cross =
        fp_a.stride.x() * fp_b.stride.y() - fp_a.stride.y() * fp_b.stride.x();
    cost += weights.k3 * std::abs(cross) / (na * nb);
  }
  return cost;
}

BipartiteGraph build_bipartite_graph(const std::vector<FootPair>& view_a_feet,
                                     const std::vector<FootPair>& view_b_feet,
                                     const GroundHomography& h,
                                     const EdgeWeights& weights) {
  BipartiteGraph g;
  g.view_a = h.to_view;
  g.view_b = h.from_view;
  g.cost.resize(static_cast<Eigen::Index>(view_a_feet.size()),
                static_cast<Eigen::Index>(view_b_feet.size()));
  for (std::size_t l = 0; l < view_a_feet.size(); ++l)
    for (std::size_t m = 0; m < view_b_feet.size(); ++m)
      g.cost(l, m) = edge_cost(view_a_feet[l], view_b_feet[m], h, weights);
  return g;
}

Assignment match_pair(const std::vector<FootPair>& view_a_feet,
                      const std::vector<FootPair>& view_b_feet,
                      const GroundHomography& h, const EdgeWeights& weights,
                      double gate, LapAlgorithm algorithm) {
  Assignment out;
  out.view_a = h.to_view;
  out.view_b = h.from_view;

  auto det_indices = [](const std::vector<FootPair>& feet) {
    std::vector<int> idx(feet.size());
    std::transform(feet.begin(), feet.end(), idx.begin(),
                   [](const FootPair& fp) { return fp.index; });
    return idx;
  };
  const std::vector<int> idx_a = det_indices(view_a_feet);
  const std::vector<int> idx_b = det_indices(view_b_feet);

  if (view_a_feet.empty() || view_b_feet.empty()) {
    out.unmatched_a = idx_a;
    out.unmatched_b = idx_b;
    return out;
  }

  const BipartiteGraph g = build_bipartite_graph(view_a_feet, view_b_feet, h, weights);
  const Assignment raw = solve_lap(g.cost, algorithm);

  out.unmatched_a = raw.unmatched_a;
  out.unmatched_b = raw.unmatched_b;
  for (const auto& p : raw.pairs) {
    if (p.cost > gate) {
      out.unmatched_a.push_back(p.l);
      out.unmatched_b.push_back(p.m);
    } else {
      out.pairs.push_back({idx_a[p.l], idx_b[p.m], p.cost});
    }
  }
  for (int& l : out.unmatched_a) l = idx_a[l];
  for (int& m : out.unmatched_b) m = idx_b[m];
  std::sort(out.unmatched_a.begin(), out.unmatched_a.end());
  std::sort(out.unmatched_b.begin(), out.unmatched_b.end());
  return out;
}

namespace {

struct Node {
  int view;
  int det;
  auto operator<=>(const Node&) const = default;
};

struct Edge {
  Node a;
  Node b;
  double cost;
};

}  // namespace

PersonTrackSet merge_multiview(const std::vector<Assignment>& pairwise) {
  // Ring check: with n >= 3 assignments every view appears in exactly two of
  // them and the view graph is one cycle; a single assignment (2 views) is
  // the degenerate ring.
  std::map<int, std::vector<int>> view_degree;  // view -> assignment indices
  for (std::size_t i = 0; i < pairwise.size(); ++i) {
    const auto& asg = pairwise[i];
    if (asg.view_a == asg.view_b)
      throw RingTopologyError("assignment connects a view to itself");
    view_degree[asg.view_a].push_back(static_cast<int>(i));
    view_degree[asg.view_b].push_back(static_cast<int>(i));
  }
  if (pairwise.empty()) return {};
  if (pairwise.size() == 1) {
    if (view_degree.size() != 2)
      throw RingTopologyError("two-view merge needs exactly two views");
  } else {
    if (pairwise.size() != view_degree.size())
      throw RingTopologyError("assignments do not form a ring over the views");
    for (const auto& [view, members] : view_degree)
      if (members.size() != 2)
        throw RingTopologyError("view is not in exactly two assignments");
    // Connectivity: walk the cycle from the first assignment.
    std::set<int> visited;
    int current = 0;
    int entry_view = pairwise[0].view_a;
    while (visited.insert(current).second) {
      const auto& asg = pairwise[current];
      const int next_view = asg.view_a == entry_view ? asg.view_b : asg.view_a;
      const auto& members = view_degree[next_view];
      current = members[0] == current ? members[1] : members[0];
      entry_view = next_view;
    }
    if (visited.size() != pairwise.size())
      throw RingTopologyError("assignments form more than one ring");
  }

  // Collect nodes and candidate edges.
  std::set<Node> nodes;
  std::vector<Edge> edges;
  for (const auto& asg : pairwise) {
    for (const auto& p : asg.pairs) {
      const Node na{asg.view_a, p.l};
      const Node nb{asg.view_b, p.m};
      nodes.insert(na);
      nodes.insert(nb);
      edges.push_back({na, nb, p.cost});
    }
    for (int l : asg.unmatched_a) nodes.insert({asg.view_a, l});
    for (int m : asg.unmatched_b) nodes.insert({asg.view_b, m});
  }

  // Greedy chain growth, cheaper edges first: an edge is kept when the two
  // chains it joins share no view. An edge whose endpoints already share a
  // chain closes that chain's cycle and changes nothing structurally.
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& x, const Edge& y) { return x.cost < y.cost; });

  std::map<Node, int> chain_of;
  std::vector<std::map<int, int>> chains;  // chain -> (view -> det)
  int next_chain = 0;
  for (const auto& node : nodes) {
    chain_of[node] = next_chain++;
    chains.push_back({{node.view, node.det}});
  }

  for (const auto& e : edges) {
    const int ca = chain_of[e.a];
    const int cb = chain_of[e.b];
    if (ca == cb) continue;  // consistent cycle closure
    const auto& va = chains[ca];
    const auto& vb = chains[cb];
    const bool disjoint_views = std::none_of(
        vb.begin(), vb.end(),
        [&va](const auto& kv) { return va.count(kv.first) > 0; });
    if (!disjoint_views) continue;  // would put two detections in one view

    // Merge the smaller chain into the larger.
    const int keep = va.size() >= vb.size() ? ca : cb;
    const int drop = keep == ca ? cb : ca;
    for (const auto& [view, det] : chains[drop]) {
      chains[keep].emplace(view, det);
      chain_of[{view, det}] = keep;
    }
    chains[drop].clear();
  }

  PersonTrackSet tracks;
  for (auto& chain : chains)
    if (!chain.empty()) tracks.persons.push_back(std::move(chain));
  tracks.validate();
  return tracks;
}

FootPair extract_foot_pairs(const Detection2D& det, const SkeletonSchema& schema,
                            const GroundHomography& h_to_ref,
                            double min_confidence) {
  if (h_to_ref.from_view != det.view)
    throw ViewMismatch("extract_foot_pairs: rectifier starts at another view");

  const int lh = schema.left_heel;
  const int rh = schema.right_heel;
  const int m = static_cast<int>(det.joints.size());
  if (lh >= m || rh >= m)
    throw std::invalid_argument("detection has fewer joints than the schema");

  const JointObs& left = det.joints[lh];
  const JointObs& right = det.joints[rh];
  if (!left.present || !right.present || left.confidence < min_confidence ||
      right.confidence < min_confidence)
    throw MissingFeet("heel joints absent or below the confidence threshold");

  FootPair fp;
  fp.view = det.view;
  fp.index = det.person_index;
  fp.left = left.position;
  fp.right = right.position;
  const Point2 rect_left = rectify(h_to_ref, left.position);
  const Point2 rect_right = rectify(h_to_ref, right.position);
  fp.anchor = 0.5 * (rect_left + rect_right);
  fp.stride = rect_right - rect_left;
  return fp;
}

}  // namespace cp3d

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bmatch/graph.hpp"

namespace bmatch {

struct FlowArc {
  int from = 0;
  int to = 0;
  double capacity = 0.0;  // +inf for matching edges
};

/// Source a → left nodes (cap α) → right nodes along graph edges (cap ∞) → sink f (cap α).
/// Node numbering: left 0..L−1, right L..L+R−1, source L+R, sink L+R+1.
struct FlowNetwork {
  int n_left = 0;
  int n_right = 0;
  std::vector<FlowArc> arcs;
  /// State-vector position of each left/right node.
  std::vector<int> state_index;

  int n_nodes() const noexcept { return n_left + n_right + 2; }
  int source() const noexcept { return n_left + n_right; }
  int sink() const noexcept { return n_left + n_right + 1; }
};

/// Network on D ∪ S with D on the left. Edges are those of g inside D × S.
FlowNetwork make_network(const MatchingGraph& g, const DemandSet& d, const std::vector<int>& s,
                         std::span<const double> alpha);
/// Same but with the supply classes S on the left (flow runs supply → demand).
FlowNetwork make_reversed_network(const MatchingGraph& g, const DemandSet& d,
                                  const std::vector<int>& s, std::span<const double> alpha);

struct Flow {
  std::vector<double> flow;  // per arc
  double value = 0.0;
};

/// Edmonds–Karp maximum flow.
Flow max_flow(const FlowNetwork& net);

/// Capacity and conservation check to tol.
bool flow_is_valid(const FlowNetwork& net, const Flow& f, double tol = 1e-10);

struct PositiveFlow {
  FlowNetwork net;
  Flow flow;
  double gamma = 0.0;  // smallest flow on a matching edge
  double nu = 0.0;     // per-edge floor used in the construction
};

/// Maximum flow of value α_D on the network restricted to D ∪ Σ(D), positive on every edge.
/// delta_lower is the Hall slack to use for the edge floor; computed when absent.
/// Throws NCondViolated or DisconnectedRestriction.
PositiveFlow strictly_positive_flow(const MatchingGraph& g, const DemandSet& d,
                                    std::span<const double> alpha,
                                    std::optional<double> delta_lower = std::nullopt);

/// Positive flow on D^c ∪ S^c with supply on the left; value α_{S^c}.
PositiveFlow strictly_positive_flow_complement(const MatchingGraph& g, const DemandSet& d,
                                               std::span<const double> alpha,
                                               std::optional<double> delta_lower = std::nullopt);

}  // namespace bmatch

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bmatch {

/// A (demand, supply) pair. Used both for matching edges and arrival pairs.
/// Indices are class indices within their side, starting at 0.
struct Edge {
  int demand = 0;
  int supply = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Buffer levels, demand classes first then supply classes.
using State = std::vector<int>;

/// Sorted list of demand class indices.
using DemandSet = std::vector<int>;

/// Bipartite matching network. Plain aggregate; call validate_graph() before use.
struct MatchingGraph {
  int n_demand = 0;
  int n_supply = 0;
  std::vector<Edge> edges;
  std::vector<Edge> arrival_pairs;
  int max_matches = 4;

  int dim() const noexcept { return n_demand + n_supply; }
  /// State-vector position of supply class j.
  int supply_node(int j) const noexcept { return n_demand + j; }

  /// Supply classes adjacent to demand class i, ascending.
  std::vector<int> supply_neighbors(int i) const;
  /// Demand classes adjacent to supply class j, ascending.
  std::vector<int> demand_neighbors(int j) const;
  /// Σ(D): union of supply neighbours of D.
  std::vector<int> supply_neighbors(const DemandSet& d) const;

  /// Index of edge (i, j) in `edges`, if present.
  std::optional<int> edge_index(Edge e) const;
  bool is_arrival_pair(Edge e) const;
};

/// Throws Error{DisconnectedGraph | IndexOutOfRange | EmptyEdgeSet | InvalidMaxMatches}.
void validate_graph(const MatchingGraph& g);

/// True if the subgraph induced on D ∪ S (edges with both ends inside) is
/// connected. Empty node sets count as disconnected.
bool restricted_connected(const MatchingGraph& g, const DemandSet& d, const std::vector<int>& s);

/// ξ⁰·x with ξ⁰ = (1,…,1,−1,…,−1).
int balance(const MatchingGraph& g, std::span<const int> x);

/// Workload vector ξ^D: +1 on D, −1 on Σ(D), 0 elsewhere.
struct WorkloadVector {
  std::vector<int> xi;
  DemandSet demand_set;
  std::vector<int> supply_set;  // Σ(D), supply class indices

  int dot(std::span<const int> x) const;
  double dot(std::span<const double> x) const;
};

/// Throws Error{EmptyOrFullSubset} unless D is non-empty and proper.
WorkloadVector workload_vector(const MatchingGraph& g, const DemandSet& d);

struct NCondResult {
  bool satisfied = false;
  /// Argmax subset of ξ^D·α; set only when the condition fails.
  std::optional<DemandSet> witness;
  /// max over non-empty proper D of ξ^D·α (negative iff satisfied).
  double margin = 0.0;
};

/// Demand-only stabilizability check: ξ^D·α < 0 for every non-empty proper D.
/// alpha has length dim(). Caps n_demand at 20.
NCondResult check_ncond(const MatchingGraph& g, std::span<const double> alpha);

/// Match counts n_e, one entry per graph edge.
struct MatchingDecision {
  std::vector<int> counts;

  int total() const;
  bool is_zero() const;
  /// u = Σ n_e u^e as a state-length vector.
  std::vector<int> induced(const MatchingGraph& g) const;

  bool operator==(const MatchingDecision&) const = default;
};

/// Every decision with Σn_e ≤ max_matches and u ≤ x componentwise, zero included.
/// Ordered lexicographically descending by counts.
std::vector<MatchingDecision> feasible_decisions(const MatchingGraph& g, std::span<const int> x);

bool is_feasible(const MatchingGraph& g, std::span<const int> x, const MatchingDecision& u);

/// x − u + (1^i + 1^j). Throws InfeasibleDecision or InvalidArrival.
State step(const MatchingGraph& g, std::span<const int> x, const MatchingDecision& u, Edge arrival);

/// Cross-matches I(u) = −ξ·u.
int idleness(const MatchingGraph& g, const WorkloadVector& xi, const MatchingDecision& u);

}  // namespace bmatch

#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bmatch/effective_cost.hpp"
#include "bmatch/graph.hpp"
#include "bmatch/random.hpp"
#include "bmatch/value_function.hpp"

namespace bmatch {

enum class PolicyKind { HMWT, HMaxWeight, GreedyMaxWeight, Priority, RandomizedFlow };
enum class QuadraticWeights { Unit, Cost };

std::string to_string(PolicyKind k);
PolicyKind parse_policy_kind(const std::string& s);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::HMWT;
  double tau = 0.0;                          // HMWT threshold
  HParams h;                                 // HMWT
  bool shift_h_to_tau = true;                // HMWT: centre ĥ at −tau
  QuadraticWeights weights = QuadraticWeights::Unit;  // HMaxWeight
  CostVector cost;                           // GreedyMaxWeight, HMaxWeight with Cost weights
  std::vector<Edge> priority_order;          // Priority
  DemandSet d;                               // RandomizedFlow
  bool split_components = false;             // RandomizedFlow: D ∪ Σ(D) and D^c ∪ S^c separately
};

/// Argmax of Σ n_e·score_e over feasible decisions with at most `max_cross`
/// matches on edges flagged in `cross`. Ties prefer more matches, then the
/// lexicographically larger count vector.
MatchingDecision best_decision(const MatchingGraph& g, std::span<const int> x,
                               std::span<const double> edge_score, std::span<const char> cross,
                               int max_cross);

MatchingDecision hmwt_decide(const MatchingGraph& g, const HParams& h, double tau,
                             std::span<const int> x);
MatchingDecision h_maxweight_decide(const MatchingGraph& g, std::span<const double> weights,
                                    std::span<const int> x);
MatchingDecision greedy_maxweight_decide(const MatchingGraph& g, const CostVector& c,
                                         std::span<const int> x, Edge arrival);
MatchingDecision priority_decide(const MatchingGraph& g, std::span<const Edge> order,
                                 std::span<const int> x, Edge arrival);

/// Flow-derived matching data: for every state position, its partners in the
/// same component together with the flow on the joining edge.
struct FlowPlan {
  std::vector<std::vector<std::pair<int, double>>> partners;
  std::vector<double> alpha;
  /// Total flow through each node's capacitated arc.
  std::vector<double> throughput;
};

FlowPlan make_flow_plan(const MatchingGraph& g, std::span<const double> alpha, const DemandSet& d,
                        bool split_components);

/// Per arriving class k (state position): (partner position, probability)
/// over partners with a non-empty queue. Empty when no partner is available.
struct MatchProbabilities {
  std::vector<std::vector<std::pair<int, double>>> probs;
};

/// Probability vector for one arriving class. Throws EmptyOppositeSide.
std::vector<std::pair<int, double>> match_vector(const FlowPlan& plan, int k,
                                                 std::span<const int> q);
MatchProbabilities matching_vectors(const FlowPlan& plan, std::span<const int> q);

/// Matches each arrival against the queue q = x − a; demand arrival first.
MatchingDecision randomized_flow_decide(const MatchingGraph& g, const FlowPlan& plan,
                                        std::span<const int> x, Edge arrival, Rng& rng);

class Policy {
 public:
  virtual ~Policy() = default;
  /// x is the post-arrival state X(t); arrival is the pair that just arrived.
  virtual MatchingDecision decide(std::span<const int> x, Edge arrival, Rng& rng) = 0;
};

/// Throws InvalidParameter on missing kind-specific fields.
std::unique_ptr<Policy> make_policy(const MatchingGraph& g, const PolicyConfig& cfg,
                                    std::span<const double> alpha);

}  // namespace bmatch

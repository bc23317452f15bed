#pragma once

#include <cstdint>
#include <vector>

#include "bmatch/arrivals.hpp"
#include "bmatch/effective_cost.hpp"
#include "bmatch/graph.hpp"
#include "bmatch/relaxation.hpp"
#include "bmatch/simulator.hpp"

namespace bmatch {

/// X-state MDP on balanced states inside [0, cap]^ℓ. An arrival pair that
/// would push a buffer above cap is dropped as a whole.
struct TruncatedMDP {
  MatchingGraph graph;
  ArrivalDistribution arrivals;
  CostVector cost;
  int buffer_cap = 8;
  CostBasis cost_basis = CostBasis::X;
  std::size_t max_states = 2000000;
};

struct ValueIterationOptions {
  double tol = 1e-8;
  std::uint64_t max_iters = 2000000;
  /// Self-loop weight 1 − λ of the aperiodicity transform; λ = 1 disables it.
  double lambda = 0.5;
};

struct MdpSolution {
  double eta_star = 0.0;
  std::vector<State> states;
  std::vector<double> h_star;  // h*(0) = 0
  std::vector<MatchingDecision> policy;
  std::uint64_t iterations = 0;
  double span = 0.0;

  /// Position of x in `states`, or −1.
  long index_of(std::span<const int> x) const;
  int cap = 0;
};

/// Throws NCondViolated, StateSpaceTooLarge or NoConvergence.
MdpSolution mdp_value_iteration(const TruncatedMDP& m, const ValueIterationOptions& opt = {});

/// Simulates the tabulated policy on the same truncated dynamics.
SimResult simulate_mdp_policy(const TruncatedMDP& m, const MdpSolution& sol,
                              std::uint64_t horizon, std::uint64_t seed);

struct RelaxationSolution {
  double eta_hat_star = 0.0;
  double threshold_estimate = 0.0;
  int w_min = 0;
  std::vector<int> idle;  // optimal idleness at w = w_min + k
  std::uint64_t iterations = 0;
};

/// Value iteration for the relaxation on the integer lattice [−w_max, w_max]
/// with clamping at both ends; idleness takes values 0..floor(idle_cap).
RelaxationSolution relaxation_value_iteration(const RelaxationModel& model, int w_max,
                                              const ValueIterationOptions& opt = {});

}  // namespace bmatch

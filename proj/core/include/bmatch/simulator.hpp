#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bmatch/arrivals.hpp"
#include "bmatch/effective_cost.hpp"
#include "bmatch/graph.hpp"
#include "bmatch/policies.hpp"

namespace bmatch {

enum class CostBasis { Q, X };

struct SimConfig {
  MatchingGraph graph;
  ArrivalDistribution arrivals;
  CostVector cost;
  PolicyConfig policy;
  std::uint64_t horizon = 1000000;
  std::optional<std::uint64_t> burn_in;  // default horizon/100
  std::uint64_t seed = 1;
  State initial_state;                   // Q(0); zeros when empty
  CostBasis cost_basis = CostBasis::Q;
  /// Workload used for idleness and workload statistics; empty disables them.
  WorkloadVector xi;
  /// Verify feasibility, balance and the threshold rule at every step.
  bool check_invariants = false;
};

struct SimResult {
  double avg_cost = 0.0;
  double stderr = 0.0;
  double idleness_rate = 0.0;
  double mean_workload = 0.0;
  std::vector<double> per_buffer_means;
  int max_buffer = 0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  /// Steps with I(t) > 0 while W(t) ≥ −τ (h-MWT only).
  std::uint64_t idle_above_threshold = 0;
};

/// Throws on invalid configuration; an NCond violation is not an error.
SimResult run(const SimConfig& cfg);

struct Variation {
  std::string label;
  PolicyConfig policy;
  std::optional<double> tau;
};

struct ExperimentRow {
  std::string label;
  std::optional<double> tau;
  SimResult result;
};

struct ExperimentOptions {
  unsigned threads = 1;
  /// Reuse the base seed for every variation instead of deriving one per index.
  bool common_random_numbers = false;
};

/// One run per variation; rows come back in variation order.
std::vector<ExperimentRow> run_experiment(const SimConfig& base, const std::vector<Variation>& vars,
                                          const ExperimentOptions& opt = {});

struct SweepResult {
  std::vector<ExperimentRow> rows;
  double tau_best = 0.0;
  double tau_star = 0.0;
};

/// h-MWT runs over a threshold grid; base.policy must be HMWT.
SweepResult threshold_sweep(const SimConfig& base, const std::vector<double>& taus,
                            const ExperimentOptions& opt = {});

/// Thread count from BMATCH_THREADS, else hardware concurrency.
unsigned default_threads();

}  // namespace bmatch

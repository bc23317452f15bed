#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bmatch/arrivals.hpp"
#include "bmatch/effective_cost.hpp"
#include "bmatch/graph.hpp"
#include "bmatch/policies.hpp"
#include "bmatch/simulator.hpp"
#include "bmatch/value_function.hpp"

namespace bmatch::cli {

using PairMasses = std::vector<std::pair<Edge, double>>;

struct FamilySection {
  PairMasses endpoint0;
  PairMasses endpoint1;
  double delta = 0.0;
  bool operator==(const FamilySection&) const = default;
};

struct PolicySection {
  std::string kind = "hmwt";
  std::optional<double> tau;  // nullopt: τ*
  HTuning tuning;
  std::string weights = "unit";
  std::vector<Edge> priority_order;
  bool split_components = false;
  bool shift_h = true;
  bool operator==(const PolicySection&) const;
};

struct SimSection {
  std::uint64_t horizon = 1000000;
  std::optional<std::uint64_t> burn_in;
  std::uint64_t seed = 1;
  std::string cost_basis = "Q";
  State initial_state;
  bool operator==(const SimSection&) const = default;
};

struct ExperimentSection {
  std::string kind;  // "threshold_sweep", "policy_compare" or empty
  std::vector<double> grid;
  std::vector<std::string> policies;
  bool common_random_numbers = false;
  bool operator==(const ExperimentSection&) const = default;
};

struct OracleSection {
  int cap = 8;
  double tol = 1e-8;
  int w_max = 200;
  bool operator==(const OracleSection&) const = default;
};

/// Parsed experiment file. Class indices are 0-based in memory, 1-based on disk.
struct ExperimentConfig {
  MatchingGraph graph;
  bool arrival_pairs_all = false;
  PairMasses arrivals;
  std::optional<FamilySection> family;
  std::vector<double> cost;
  std::optional<DemandSet> workload;
  PolicySection policy;
  SimSection sim;
  ExperimentSection experiment;
  OracleSection oracle;
  bool operator==(const ExperimentConfig&) const;
};

/// Throws Error{InvalidConfig} on unknown keys or malformed values.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Everything downstream modules need, validated.
struct Resolved {
  MatchingGraph graph;
  ArrivalDistribution dist;
  CostVector cost;
  std::optional<WorkloadVector> xi;
  std::optional<ArrivalMoments> moments;
  std::optional<EffectiveCostSlopes> slopes;
  std::optional<HParams> h;
  double tau = 0.0;  // resolved h-MWT threshold
};

Resolved resolve(const ExperimentConfig& cfg);

/// Policy for `kind` with the config's parameters (tau, tuning, order, D).
PolicyConfig policy_for(const ExperimentConfig& cfg, const Resolved& r, const std::string& kind);

SimConfig sim_config(const ExperimentConfig& cfg, const Resolved& r);

}  // namespace bmatch::cli

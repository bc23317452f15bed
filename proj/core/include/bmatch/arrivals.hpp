#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bmatch/graph.hpp"
#include "bmatch/random.hpp"

namespace bmatch {

/// I.i.d. law of the single (demand, supply) pair arriving each slot.
class ArrivalDistribution {
 public:
  ArrivalDistribution() = default;

  const std::vector<Edge>& pairs() const noexcept { return pairs_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  int n_demand() const noexcept { return n_demand_; }
  int n_supply() const noexcept { return n_supply_; }

  /// Mass on pair e (0 if absent).
  double prob(Edge e) const;

  /// Mean arrival vector α, length ℓ.
  std::vector<double> alpha() const;

  /// Draws one arrival pair; consumes exactly one uniform.
  Edge sample(Rng& rng) const;

 private:
  friend ArrivalDistribution build_distribution(const MatchingGraph&,
                                                const std::vector<std::pair<Edge, double>>&);
  std::vector<Edge> pairs_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  int n_demand_ = 0;
  int n_supply_ = 0;
};

/// Throws NotNormalized (negative mass or total off by >1e-12) or
/// UnsupportedPair (mass on a pair outside the graph's arrival pairs).
/// Repeated pairs are merged.
ArrivalDistribution build_distribution(const MatchingGraph& g,
                                       const std::vector<std::pair<Edge, double>>& probs);

struct ArrivalMoments {
  std::vector<double> alpha;
  /// δ = −ξ·α
  double delta = 0.0;
  /// Var(ξ·A)
  double sigma2_delta = 0.0;
  /// P{ξ·A = −1}, P{ξ·A = 0}, P{ξ·A = +1}
  std::array<double, 3> increment_probs{};
};

ArrivalMoments moments(const MatchingGraph& g, const ArrivalDistribution& dist,
                       const WorkloadVector& xi);

/// Linear interpolation between two endpoint laws, parameterized by the
/// drift of a designated workload vector:
///   probs(δ) = (1 − t)·probs⁰ + t·probs¹,  t = (δ − δ₀)/(δ₁ − δ₀)
/// where δ₀, δ₁ are the endpoint drifts. With δ₀ = 0 this is the usual
/// (1 − δ/δ̄)·probs⁰ + (δ/δ̄)·probs¹ family.
struct ArrivalFamily {
  ArrivalDistribution endpoint0;
  ArrivalDistribution endpoint1;

  ArrivalDistribution at(const MatchingGraph& g, const WorkloadVector& xi, double delta) const;

  /// Constant b with E‖A^δ − A^{δ₀}‖₂ ≤ b·(δ − δ₀) under the mixture coupling.
  double linear_rate_constant(const MatchingGraph& g, const WorkloadVector& xi) const;
};

/// Advisory checks of the heavy-traffic family assumptions.
struct AssumptionReport {
  double designated_drift = 0.0;   // ξ^D·α (should be −δ < 0)
  double other_max_drift = 0.0;    // max over D' ≠ D of ξ^{D'}·α
  bool a1_ok = false;              // other_max_drift ≤ −δ̲
  std::optional<Edge> a3_pair;     // best (j0 ∈ D^c, i0 ∈ Σ(D)) arrival pair
  double a3_mass = 0.0;
  bool a3_ok = false;              // a3_mass ≥ p_I
  bool split_connected = false;    // both no-cross-match components connected
  std::vector<std::string> warnings;
};

AssumptionReport check_assumptions(const MatchingGraph& g, const ArrivalDistribution& dist,
                                   const WorkloadVector& xi, double delta_lower, double p_idle);

}  // namespace bmatch

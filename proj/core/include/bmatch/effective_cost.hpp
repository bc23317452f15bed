#pragma once

#include <span>
#include <vector>

#include "bmatch/graph.hpp"

namespace bmatch {

/// Linear holding cost c(x) = Σ c_k x_k with every c_k > 0.
struct CostVector {
  std::vector<double> c;

  double operator()(std::span<const int> x) const;
  double operator()(std::span<const double> x) const;
};

/// Throws InvalidParameter on a non-positive entry or length mismatch.
void validate_cost(const MatchingGraph& g, const CostVector& c);

/// Slopes of c̄(w) = max(c̄₊w, −c̄₋w) and the state indices attaining them.
struct EffectiveCostSlopes {
  double c_plus = 0.0;
  double c_minus = 0.0;
  double c_plus_d = 0.0;   // min{c_i : i ∈ D}
  double c_plus_s = 0.0;   // min{c_j : j ∈ S^c}
  double c_minus_d = 0.0;  // min{c_i : i ∈ D^c}
  double c_minus_s = 0.0;  // min{c_j : j ∈ S}
  // State-vector positions of the minimizers (lowest index wins ties).
  int i_plus = -1;
  int j_plus = -1;
  int i_minus = -1;
  int j_minus = -1;

  double cost(double w) const noexcept { return w >= 0.0 ? c_plus * w : -c_minus * w; }
  /// Right derivative for w ≥ 0 is c̄₊; for w < 0 it is −c̄₋.
  double slope(double w) const noexcept { return w > 0.0 ? c_plus : (w < 0.0 ? -c_minus : 0.0); }
};

/// Throws EmptyComplement when S^c or D^c is empty.
EffectiveCostSlopes slopes(const MatchingGraph& g, const CostVector& c, const WorkloadVector& xi);

struct EffectiveState {
  double cost = 0.0;
  std::vector<double> x_star;
};

/// c̄(w) and the two-entry minimizer x*(w).
EffectiveState evaluate(const EffectiveCostSlopes& s, int dim, double w);

/// min{c(x) : x ≥ 0, ξ·x = w, ξ⁰·x = 0} by enumerating every basic
/// solution of the two equality constraints (all index pairs and single
/// indices). Exact for linear costs; does not use the slope formulas.
double brute_oracle(const MatchingGraph& g, const CostVector& c, const WorkloadVector& xi, int w);

}  // namespace bmatch

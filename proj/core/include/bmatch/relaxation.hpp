#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "bmatch/arrivals.hpp"
#include "bmatch/effective_cost.hpp"

namespace bmatch {

/// One-dimensional workload relaxation
///   Ŵ(t+1) = Ŵ(t) − δ + Î(t) + Δ(t+1),
/// whose uncontrolled increment −δ + Δ = ξ·A lives on {−1, 0, +1}.
struct RelaxationModel {
  double delta = 0.0;
  double sigma2 = 0.0;
  /// P{ξ·A = −1}, P{ξ·A = 0}, P{ξ·A = +1}
  std::array<double, 3> increment_probs{};
  EffectiveCostSlopes slopes;
  double idle_cap = 4.0;
};

/// Checks masses sum to 1, mean = −δ and variance = σ² to 1e−12.
RelaxationModel make_relaxation(const ArrivalMoments& m, const EffectiveCostSlopes& s,
                                double idle_cap);

/// Increment law P{+1} = (1 − δ − p0)/2, P{−1} = (1 + δ − p0)/2, P{0} = p0.
RelaxationModel symmetric_relaxation(double delta, double c_plus, double c_minus,
                                     double p_zero = 0.0, double idle_cap = 4.0);

struct TauStar {
  double tau = 0.0;
  double eta_ss = 0.0;  // η̂** = τ*·c̄₋
};

/// Diffusion heuristic τ* = ½(σ²/δ)·log(1 + c̄₊/c̄₋). Throws ZeroDrift if δ ≤ 0.
TauStar tau_star(double delta, double sigma2, double c_plus, double c_minus);
TauStar tau_star(const RelaxationModel& m);

struct RelaxationRun {
  double avg_cost = 0.0;
  double stderr = 0.0;
  /// Smallest post-reflection value Ŵ(t) − δ + Î(t) observed.
  double min_post_reflection = 0.0;
};

/// Threshold policy Î(t) = max{δ − Ŵ(t) − τ, 0}; 1% burn-in, 100 batches.
/// Ŵ(0) defaults to −τ.
RelaxationRun simulate_relaxation(const RelaxationModel& m, double tau, std::uint64_t horizon,
                                  std::uint64_t seed, std::optional<double> w0 = std::nullopt);

/// Stationary average cost of the threshold policy, from the geometric law
/// of the reflected lattice walk Ŵ − Δ on −τ + ℤ₊.
double threshold_cost_exact(const RelaxationModel& m, double tau);

enum class ThresholdEval { Exact, Simulation };

struct ThresholdSearch {
  double tau_best = 0.0;
  double eta_hat = 0.0;
  std::vector<double> costs;
  std::vector<double> stderrs;
};

ThresholdSearch optimal_threshold(const RelaxationModel& m, const std::vector<double>& tau_grid,
                                  ThresholdEval eval = ThresholdEval::Exact,
                                  std::uint64_t horizon = 1000000, std::uint64_t seed = 1);

}  // namespace bmatch

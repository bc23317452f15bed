#pragma once

#include <span>
#include <vector>

#include "bmatch/effective_cost.hpp"
#include "bmatch/graph.hpp"

namespace bmatch {

struct Tilde {
  double value = 0.0;
  double deriv = 0.0;
};

/// Buffer perturbation v + β(e^{−v/β} − 1), for v ≥ 0.
Tilde tilde(double v, double beta);
/// Signed workload perturbation sign(w)(|w| + β(e^{−|w|/β} − 1)).
Tilde tilde_signed(double w, double beta);

struct HTuning {
  double theta = 1.0;        // extension rate below −τ*
  double delta_plus = 0.01;  // extra idleness rate below −τ*
  double beta = 10.0;        // smoothing scale
  double kappa = 1.0;        // penalty weight
};

/// Coefficients of the piecewise ĥ and everything needed to evaluate h.
///   w ≥ 0:        A₊w² + B₊w
///   −τ* ≤ w < 0:  A₋w² + B₋w + C₋ + D₋e^{Θw}
///   w < −τ*:      convex C² extension with rate θ and drift δ₊
struct HParams {
  double A_plus = 0.0, B_plus = 0.0;
  double A_minus = 0.0, B_minus = 0.0, C_minus = 0.0, D_minus = 0.0;
  double Theta = 0.0;
  double tau_star = 0.0;
  double eta_ss = 0.0;
  double delta = 0.0;
  double sigma2 = 0.0;
  HTuning tuning;
  EffectiveCostSlopes slopes;
  WorkloadVector xi;
  CostVector c;
  double hhat_at_floor = 0.0;  // ĥ(−τ*)
  /// h uses ĥ(w + shift); a shift of τ − τ* moves the minimum of ĥ to −τ.
  double shift = 0.0;
};

/// Throws ZeroDrift, ZeroVariance, or InvalidParameter on a non-positive tuning value.
HParams build_params(double delta, double sigma2, const EffectiveCostSlopes& s, HTuning tuning = {},
                     WorkloadVector xi = {}, CostVector c = {});

/// Copy of p whose ĥ term has its minimum at −tau.
HParams with_threshold(const HParams& p, double tau);

/// ĥ (order 0), ĥ′ (order 1) or ĥ″ (order 2).
double hhat_eval(const HParams& p, double w, int order);

struct HValue {
  double h = 0.0;
  std::vector<double> grad;
};

HValue h_and_grad(const HParams& p, std::span<const double> x);
HValue h_and_grad(const HParams& p, std::span<const int> x);

/// ∇h only, written into `grad` (length dim); avoids allocation in policy loops.
void h_grad_into(const HParams& p, std::span<const int> x, std::span<double> grad);

}  // namespace bmatch

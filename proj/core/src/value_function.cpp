#include "bmatch/value_function.hpp"

#include <cmath>

#include "bmatch/error.hpp"
#include "bmatch/relaxation.hpp"

namespace bmatch {

Tilde tilde(double v, double beta) {
  const double e = std::exp(-v / beta);
  return {v + beta * std::expm1(-v / beta), 1.0 - e};
}

Tilde tilde_signed(double w, double beta) {
  const double a = std::abs(w);
  const double mag = a + beta * std::expm1(-a / beta);
  return {w < 0.0 ? -mag : mag, -std::expm1(-a / beta)};
}

HParams build_params(double delta, double sigma2, const EffectiveCostSlopes& s, HTuning tuning,
                     WorkloadVector xi, CostVector c) {
  if (!(delta > 0.0)) throw Error(ErrorCode::ZeroDrift, "value function needs delta > 0");
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::ZeroVariance, "value function needs sigma2 > 0");
  if (!(tuning.theta > 0.0) || !(tuning.delta_plus > 0.0) || !(tuning.beta > 0.0) ||
      !(tuning.kappa > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "theta, delta_plus, beta and kappa must be positive");
  }
  HParams p;
  p.delta = delta;
  p.sigma2 = sigma2;
  p.tuning = tuning;
  p.slopes = s;
  p.xi = std::move(xi);
  p.c = std::move(c);
  const auto ts = tau_star(delta, sigma2, s.c_plus, s.c_minus);
  p.tau_star = ts.tau;
  p.eta_ss = ts.eta_ss;
  p.Theta = 2.0 * delta / sigma2;
  p.A_plus = s.c_plus / (2.0 * delta);
  p.A_minus = -s.c_minus / (2.0 * delta);
  p.B_plus = (2.0 / p.Theta) * p.A_plus - p.eta_ss / delta;
  p.B_minus = (2.0 / p.Theta) * p.A_minus - p.eta_ss / delta;
  p.D_minus = (s.c_plus + s.c_minus) / (p.Theta * p.Theta * delta);
  p.C_minus = -p.D_minus;

  const double scale = std::abs(p.B_plus) + std::abs(p.B_minus) + p.Theta * p.D_minus + 1.0;
  if (std::abs(p.B_minus + p.Theta * p.D_minus - p.B_plus) > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidParameter, "value function coefficients fail the C1 identity");
  }
  const double curv = 2.0 * p.A_minus + p.Theta * p.Theta * p.D_minus * std::exp(-p.Theta * p.tau_star);
  if (std::abs(curv) > 1e-10 * (2.0 * std::abs(p.A_minus) + 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "value function curvature at the floor is not zero");
  }
  const double w = -p.tau_star;
  p.hhat_at_floor = p.A_minus * w * w + p.B_minus * w + p.C_minus + p.D_minus * std::exp(p.Theta * w);
  return p;
}

HParams with_threshold(const HParams& p, double tau) {
  HParams q = p;
  q.shift = tau - p.tau_star;
  return q;
}

double hhat_eval(const HParams& p, double w, int order) {
  if (w >= 0.0) {
    switch (order) {
      case 0: return p.A_plus * w * w + p.B_plus * w;
      case 1: return 2.0 * p.A_plus * w + p.B_plus;
      default: return 2.0 * p.A_plus;
    }
  }
  if (w >= -p.tau_star) {
    const double e = p.D_minus * std::exp(p.Theta * w);
    switch (order) {
      case 0: return p.A_minus * w * w + p.B_minus * w + p.C_minus + e;
      case 1: return 2.0 * p.A_minus * w + p.B_minus + p.Theta * e;
      default: return 2.0 * p.A_minus + p.Theta * p.Theta * e;
    }
  }
  const double th = p.tuning.theta;
  const double k = p.slopes.c_minus / p.tuning.delta_plus;
  const double s = w + p.tau_star;
  const double em1 = std::expm1(th * s);  // e^{θs} − 1
  switch (order) {
    case 0: return p.hhat_at_floor + k * (0.5 * s * s + s / th - em1 / (th * th));
    case 1: return k * (s - em1 / th);
    default: return -k * em1;
  }
}

namespace {

template <typename T>
double h_and_grad_impl(const HParams& p, std::span<const T> x, double* grad) {
  const double beta = p.tuning.beta;
  double w = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) w += p.xi.xi[k] * static_cast<double>(x[k]);
  const double dh = hhat_eval(p, w + p.shift, 1);
  double cx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) cx += p.c.c[k] * tilde(static_cast<double>(x[k]), beta).value;
  const Tilde wt = tilde_signed(w, beta);
  const double gap = cx - p.slopes.cost(wt.value);
  const double kap2 = 2.0 * p.tuning.kappa * gap;
  const double cbar_term = p.slopes.slope(wt.value) * wt.deriv;
  if (grad != nullptr) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double xk = static_cast<double>(x[k]);
      const double tk = -std::expm1(-xk / beta);
      grad[k] = dh * p.xi.xi[k] + kap2 * (p.c.c[k] * tk - cbar_term * p.xi.xi[k]);
    }
  }
  return hhat_eval(p, w + p.shift, 0) + p.tuning.kappa * gap * gap;
}

}  // namespace

HValue h_and_grad(const HParams& p, std::span<const double> x) {
  HValue v;
  v.grad.resize(x.size());
  v.h = h_and_grad_impl(p, x, v.grad.data());
  return v;
}

HValue h_and_grad(const HParams& p, std::span<const int> x) {
  HValue v;
  v.grad.resize(x.size());
  v.h = h_and_grad_impl(p, x, v.grad.data());
  return v;
}

void h_grad_into(const HParams& p, std::span<const int> x, std::span<double> grad) {
  h_and_grad_impl(p, x, grad.data());
}

}  // namespace bmatch

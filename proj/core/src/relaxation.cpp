#include "bmatch/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmatch/error.hpp"
#include "bmatch/random.hpp"
#include "bmatch/stats.hpp"

namespace bmatch {

namespace {

void check_model(const RelaxationModel& m) {
  const auto& p = m.increment_probs;
  const double total = p[0] + p[1] + p[2];
  const double mean = p[2] - p[0];
  const double var = p[2] + p[0] - mean * mean;
  if (std::abs(total - 1.0) > 1e-12 || std::abs(mean + m.delta) > 1e-12 ||
      std::abs(var - m.sigma2) > 1e-12) {
    throw Error(ErrorCode::InvalidParameter, "relaxation increments inconsistent with delta/sigma2");
  }
  if (m.idle_cap < 1.0) throw Error(ErrorCode::InvalidParameter, "idle_cap must be >= 1");
}

}  // namespace

RelaxationModel make_relaxation(const ArrivalMoments& mo, const EffectiveCostSlopes& s,
                                double idle_cap) {
  RelaxationModel m;
  m.delta = mo.delta;
  m.sigma2 = mo.sigma2_delta;
  m.increment_probs = mo.increment_probs;
  m.slopes = s;
  m.idle_cap = idle_cap;
  check_model(m);
  return m;
}

RelaxationModel symmetric_relaxation(double delta, double c_plus, double c_minus, double p_zero,
                                     double idle_cap) {
  RelaxationModel m;
  m.delta = delta;
  m.increment_probs = {(1.0 + delta - p_zero) / 2.0, p_zero, (1.0 - delta - p_zero) / 2.0};
  if (m.increment_probs[2] < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "delta + p_zero must not exceed 1");
  }
  m.sigma2 = (1.0 - p_zero) - delta * delta;
  m.slopes.c_plus = c_plus;
  m.slopes.c_minus = c_minus;
  m.idle_cap = idle_cap;
  return m;
}

TauStar tau_star(double delta, double sigma2, double c_plus, double c_minus) {
  if (!(delta > 0.0)) throw Error(ErrorCode::ZeroDrift, "tau* needs a positive drift");
  if (!(c_minus > 0.0)) throw Error(ErrorCode::InvalidParameter, "c_minus must be positive");
  TauStar t;
  t.tau = 0.5 * (sigma2 / delta) * std::log1p(c_plus / c_minus);
  t.eta_ss = t.tau * c_minus;
  return t;
}

TauStar tau_star(const RelaxationModel& m) {
  return tau_star(m.delta, m.sigma2, m.slopes.c_plus, m.slopes.c_minus);
}

RelaxationRun simulate_relaxation(const RelaxationModel& m, double tau, std::uint64_t horizon,
                                  std::uint64_t seed, std::optional<double> w0) {
  if (horizon < 1) throw Error(ErrorCode::InvalidParameter, "horizon must be >= 1");
  Rng rng(seed);
  const double p_down = m.increment_probs[0];
  const double p_down_or_zero = m.increment_probs[0] + m.increment_probs[1];
  const std::uint64_t burn = horizon / 100;
  BatchMeans stats(horizon - burn);
  RelaxationRun run;
  run.min_post_reflection = std::numeric_limits<double>::infinity();
  double w = w0.value_or(-tau);
  for (std::uint64_t t = 0; t < horizon; ++t) {
    if (t >= burn) stats.add(m.slopes.cost(w));
    const double idle = std::max(m.delta - w - tau, 0.0);
    const double post = w - m.delta + idle;
    run.min_post_reflection = std::min(run.min_post_reflection, post);
    const double u = rng.uniform();
    const double inc = u < p_down ? -1.0 : (u < p_down_or_zero ? 0.0 : 1.0);
    w = w + idle + inc;
  }
  run.avg_cost = stats.mean();
  run.stderr = stats.stderr_of_mean();
  return run;
}

double threshold_cost_exact(const RelaxationModel& m, double tau) {
  const double up = m.increment_probs[2];
  const double down = m.increment_probs[0];
  if (!(down > up)) throw Error(ErrorCode::ZeroDrift, "reflected walk is not positive recurrent");
  const double r = up / down;
  // π_k = (1 − r) r^k on Φ = −τ + k; Ŵ = Φ + δ + inc with inc independent of Φ.
  double total = 0.0;
  double weight = 1.0 - r;
  for (long k = 0; k < 100000000L; ++k) {
    double local = 0.0;
    for (int inc = -1; inc <= 1; ++inc) {
      local += m.increment_probs[inc + 1] * m.slopes.cost(-tau + k + m.delta + inc);
    }
    total += weight * local;
    weight *= r;
    if (weight * (std::abs(local) + 1.0) < 1e-18 * std::max(1.0, total) || r == 0.0) break;
  }
  return total;
}

ThresholdSearch optimal_threshold(const RelaxationModel& m, const std::vector<double>& tau_grid,
                                  ThresholdEval eval, std::uint64_t horizon, std::uint64_t seed) {
  if (tau_grid.empty()) throw Error(ErrorCode::InvalidParameter, "empty threshold grid");
  ThresholdSearch s;
  s.eta_hat = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    double cost = 0.0;
    double se = 0.0;
    if (eval == ThresholdEval::Exact) {
      cost = threshold_cost_exact(m, tau_grid[k]);
    } else {
      const auto run = simulate_relaxation(m, tau_grid[k], horizon, derive_seed(seed, k));
      cost = run.avg_cost;
      se = run.stderr;
    }
    s.costs.push_back(cost);
    s.stderrs.push_back(se);
    if (cost < s.eta_hat) {
      s.eta_hat = cost;
      s.tau_best = tau_grid[k];
    }
  }
  return s;
}

}  // namespace bmatch

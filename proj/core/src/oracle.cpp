#include "bmatch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmatch/error.hpp"
#include "bmatch/random.hpp"
#include "bmatch/stats.hpp"

namespace bmatch {

namespace {

long encode(std::span<const int> x, int cap) {
  long code = 0;
  for (int v : x) code = code * (cap + 1) + v;
  return code;
}

struct Transitions {
  // Per state: action range into action_cost/action_next.
  std::vector<std::size_t> first_action;
  std::vector<double> action_cost;
  std::vector<int> action_next;  // n_arrivals entries per action
  std::vector<double> probs;
};

}  // namespace

long MdpSolution::index_of(std::span<const int> x) const {
  for (int v : x) {
    if (v < 0 || v > cap) return -1;
  }
  const auto it = std::lower_bound(states.begin(), states.end(), x,
                                   [&](const State& s, std::span<const int> y) {
                                     return std::lexicographical_compare(s.begin(), s.end(),
                                                                         y.begin(), y.end());
                                   });
  if (it == states.end() || !std::equal(it->begin(), it->end(), x.begin(), x.end())) return -1;
  return it - states.begin();
}

MdpSolution mdp_value_iteration(const TruncatedMDP& m, const ValueIterationOptions& opt) {
  const MatchingGraph& g = m.graph;
  validate_graph(g);
  validate_cost(g, m.cost);
  if (m.buffer_cap < 2) throw Error(ErrorCode::InvalidParameter, "buffer_cap must be >= 2");
  const auto alpha = m.arrivals.alpha();
  if (!check_ncond(g, alpha).satisfied) {
    throw Error(ErrorCode::NCondViolated, "value iteration needs a stabilizable instance");
  }
  const int dim = g.dim();
  const int cap = m.buffer_cap;
  const double box = std::pow(cap + 1.0, dim);
  if (box > 1e8) throw Error(ErrorCode::StateSpaceTooLarge, "state box too large");

  MdpSolution sol;
  sol.cap = cap;
  {
    State x(dim, 0);
    const long total = static_cast<long>(box);
    for (long code = 0; code < total; ++code) {
      long c = code;
      for (int k = dim - 1; k >= 0; --k) {
        x[k] = static_cast<int>(c % (cap + 1));
        c /= cap + 1;
      }
      if (balance(g, x) == 0) {
        sol.states.push_back(x);
        if (sol.states.size() > m.max_states) {
          throw Error(ErrorCode::StateSpaceTooLarge, "balanced state count exceeds budget");
        }
      }
    }
  }
  const std::size_t n = sol.states.size();
  std::vector<int> lookup(static_cast<std::size_t>(box), -1);
  for (std::size_t s = 0; s < n; ++s) lookup[encode(sol.states[s], cap)] = static_cast<int>(s);

  const auto& pairs = m.arrivals.pairs();
  const std::size_t na = pairs.size();
  Transitions tr;
  tr.probs = m.arrivals.probs();
  std::vector<std::vector<MatchingDecision>> actions(n);
  tr.first_action.reserve(n + 1);
  for (std::size_t s = 0; s < n; ++s) {
    tr.first_action.push_back(tr.action_cost.size());
    const State& x = sol.states[s];
    actions[s] = feasible_decisions(g, x);
    for (const auto& u : actions[s]) {
      State post = x;
      const auto ind = u.induced(g);
      for (int k = 0; k < dim; ++k) post[k] -= ind[k];
      tr.action_cost.push_back(m.cost_basis == CostBasis::X ? m.cost(std::span<const int>(x))
                                                            : m.cost(std::span<const int>(post)));
      for (std::size_t a = 0; a < na; ++a) {
        State next = post;
        ++next[pairs[a].demand];
        ++next[g.supply_node(pairs[a].supply)];
        const bool over = next[pairs[a].demand] > cap || next[g.supply_node(pairs[a].supply)] > cap;
        tr.action_next.push_back(lookup[encode(over ? post : next, cap)]);
      }
    }
  }
  tr.first_action.push_back(tr.action_cost.size());

  const long anchor = lookup[0];
  const double lam = opt.lambda;
  std::vector<double> v(n, 0.0);
  std::vector<double> tv(n, 0.0);
  std::vector<int> best(n, 0);
  for (std::uint64_t it = 1; it <= opt.max_iters; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t s = 0; s < n; ++s) {
      double bv = std::numeric_limits<double>::infinity();
      int ba = 0;
      for (std::size_t a = tr.first_action[s]; a < tr.first_action[s + 1]; ++a) {
        double ev = 0.0;
        const int* nx = &tr.action_next[a * na];
        for (std::size_t k = 0; k < na; ++k) ev += tr.probs[k] * v[nx[k]];
        const double q = tr.action_cost[a] + lam * ev;
        if (q < bv - 1e-13) {
          bv = q;
          ba = static_cast<int>(a - tr.first_action[s]);
        }
      }
      tv[s] = bv + (1.0 - lam) * v[s];
      best[s] = ba;
      lo = std::min(lo, tv[s] - v[s]);
      hi = std::max(hi, tv[s] - v[s]);
    }
    const double base = tv[anchor];
    for (std::size_t s = 0; s < n; ++s) v[s] = tv[s] - base;
    sol.span = hi - lo;
    sol.iterations = it;
    if (sol.span < opt.tol) {
      sol.eta_star = 0.5 * (lo + hi);
      sol.h_star.resize(n);
      for (std::size_t s = 0; s < n; ++s) sol.h_star[s] = lam * v[s];
      sol.policy.resize(n);
      for (std::size_t s = 0; s < n; ++s) sol.policy[s] = actions[s][best[s]];
      return sol;
    }
  }
  throw Error(ErrorCode::NoConvergence, "relative value iteration did not converge");
}

SimResult simulate_mdp_policy(const TruncatedMDP& m, const MdpSolution& sol,
                              std::uint64_t horizon, std::uint64_t seed) {
  const MatchingGraph& g = m.graph;
  const int dim = g.dim();
  Rng rng(derive_seed(seed, 0));
  const std::uint64_t burn = horizon / 100;
  BatchMeans stats(horizon - burn);
  SimResult r;
  r.seed = seed;
  r.steps = horizon;
  r.per_buffer_means.assign(dim, 0.0);
  State x(dim, 0);
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const long s = sol.index_of(x);
    if (s < 0) throw Error(ErrorCode::InvalidParameter, "state left the truncated space");
    const auto& u = sol.policy[s];
    State post = x;
    const auto ind = u.induced(g);
    for (int k = 0; k < dim; ++k) post[k] -= ind[k];
    if (t >= burn) {
      stats.add(m.cost_basis == CostBasis::X ? m.cost(std::span<const int>(x))
                                             : m.cost(std::span<const int>(post)));
    }
    const Edge a = m.arrivals.sample(rng);
    State next = post;
    ++next[a.demand];
    ++next[g.supply_node(a.supply)];
    const bool over = next[a.demand] > m.buffer_cap || next[g.supply_node(a.supply)] > m.buffer_cap;
    x = over ? post : next;
    for (int v : x) r.max_buffer = std::max(r.max_buffer, v);
  }
  r.avg_cost = stats.mean();
  r.stderr = stats.stderr_of_mean();
  return r;
}

RelaxationSolution relaxation_value_iteration(const RelaxationModel& model, int w_max,
                                              const ValueIterationOptions& opt) {
  if (w_max < 1) throw Error(ErrorCode::InvalidParameter, "w_max must be >= 1");
  const int n = 2 * w_max + 1;
  const int max_idle = static_cast<int>(std::floor(model.idle_cap));
  const auto& p = model.increment_probs;
  const double lam = opt.lambda;
  std::vector<double> cost(n);
  for (int k = 0; k < n; ++k) cost[k] = model.slopes.cost(static_cast<double>(k - w_max));
  auto clamp = [&](int k) { return std::clamp(k, 0, n - 1); };

  RelaxationSolution sol;
  sol.w_min = -w_max;
  sol.idle.assign(n, 0);
  std::vector<double> v(n, 0.0);
  std::vector<double> tv(n, 0.0);
  const int anchor = w_max;
  for (std::uint64_t it = 1; it <= opt.max_iters; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int k = 0; k < n; ++k) {
      double bv = std::numeric_limits<double>::infinity();
      int bi = 0;
      for (int i = 0; i <= max_idle; ++i) {
        const int b = k + i;
        const double ev = p[0] * v[clamp(b - 1)] + p[1] * v[clamp(b)] + p[2] * v[clamp(b + 1)];
        if (ev < bv - 1e-13) {
          bv = ev;
          bi = i;
        }
      }
      tv[k] = cost[k] + lam * bv + (1.0 - lam) * v[k];
      sol.idle[k] = bi;
      lo = std::min(lo, tv[k] - v[k]);
      hi = std::max(hi, tv[k] - v[k]);
    }
    const double base = tv[anchor];
    for (int k = 0; k < n; ++k) v[k] = tv[k] - base;
    sol.iterations = it;
    if (hi - lo < opt.tol) {
      sol.eta_hat_star = 0.5 * (lo + hi);
      int lowest_zero = n - 1;
      for (int k = n - 1; k >= 0 && sol.idle[k] == 0; --k) lowest_zero = k;
      sol.threshold_estimate = model.delta - static_cast<double>(lowest_zero - w_max);
      return sol;
    }
  }
  throw Error(ErrorCode::NoConvergence, "relaxation value iteration did not converge");
}

}  // namespace bmatch

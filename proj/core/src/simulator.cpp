#include "bmatch/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "bmatch/error.hpp"
#include "bmatch/random.hpp"
#include "bmatch/stats.hpp"

namespace bmatch {

SimResult run(const SimConfig& cfg) {
  const MatchingGraph& g = cfg.graph;
  validate_graph(g);
  validate_cost(g, cfg.cost);
  if (cfg.horizon < 1) throw Error(ErrorCode::InvalidParameter, "horizon must be >= 1");
  const std::uint64_t burn = cfg.burn_in.value_or(cfg.horizon / 100);
  if (burn >= cfg.horizon) throw Error(ErrorCode::InvalidParameter, "burn_in must be < horizon");
  const int dim = g.dim();
  State q = cfg.initial_state.empty() ? State(dim, 0) : cfg.initial_state;
  if (static_cast<int>(q.size()) != dim) {
    throw Error(ErrorCode::InvalidParameter, "initial state has the wrong length");
  }
  if (std::any_of(q.begin(), q.end(), [](int v) { return v < 0; }) || balance(g, q) != 0) {
    throw Error(ErrorCode::InvalidParameter, "initial state must be non-negative and balanced");
  }
  const bool has_xi = cfg.xi.xi.size() == static_cast<std::size_t>(dim);

  const auto alpha = cfg.arrivals.alpha();
  auto policy = make_policy(g, cfg.policy, alpha);
  Rng arrival_rng(derive_seed(cfg.seed, 0));
  Rng policy_rng(derive_seed(cfg.seed, 1));

  BatchMeans stats(cfg.horizon - burn);
  SimResult r;
  r.seed = cfg.seed;
  r.steps = cfg.horizon;
  r.per_buffer_means.assign(dim, 0.0);
  std::vector<double> buffer_sums(dim, 0.0);
  double idle_sum = 0.0;
  double workload_sum = 0.0;

  State x = q;
  Edge a = cfg.arrivals.sample(arrival_rng);
  ++x[a.demand];
  ++x[g.supply_node(a.supply)];
  for (std::uint64_t t = 0; t < cfg.horizon; ++t) {
    const State& basis = cfg.cost_basis == CostBasis::Q ? q : x;
    if (t >= burn) {
      stats.add(cfg.cost(std::span<const int>(basis)));
      for (int k = 0; k < dim; ++k) buffer_sums[k] += basis[k];
    }
    const MatchingDecision u = policy->decide(x, a, policy_rng);
    if (cfg.check_invariants && !is_feasible(g, x, u)) {
      throw Error(ErrorCode::InfeasibleDecision, "policy returned an infeasible decision");
    }
    if (has_xi) {
      const int w = cfg.xi.dot(std::span<const int>(x));
      const int idle = idleness(g, cfg.xi, u);
      if (t >= burn) {
        idle_sum += idle;
        workload_sum += w;
      }
      if (cfg.policy.kind == PolicyKind::HMWT && idle > 0 && w >= -cfg.policy.tau) {
        ++r.idle_above_threshold;
      }
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const int n = u.counts[e];
      if (n == 0) continue;
      x[g.edges[e].demand] -= n;
      x[g.supply_node(g.edges[e].supply)] -= n;
    }
    q = x;
    for (int v : q) r.max_buffer = std::max(r.max_buffer, v);
    if (cfg.check_invariants && balance(g, q) != 0) {
      throw Error(ErrorCode::InvalidParameter, "state balance broken");
    }
    a = cfg.arrivals.sample(arrival_rng);
    ++x[a.demand];
    ++x[g.supply_node(a.supply)];
  }
  const double n = static_cast<double>(cfg.horizon - burn);
  r.avg_cost = stats.mean();
  r.stderr = stats.stderr_of_mean();
  r.idleness_rate = idle_sum / n;
  r.mean_workload = workload_sum / n;
  for (int k = 0; k < dim; ++k) r.per_buffer_means[k] = buffer_sums[k] / n;
  return r;
}

std::vector<ExperimentRow> run_experiment(const SimConfig& base, const std::vector<Variation>& vars,
                                          const ExperimentOptions& opt) {
  if (vars.empty()) throw Error(ErrorCode::InvalidParameter, "no variations given");
  std::vector<ExperimentRow> rows(vars.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < vars.size(); k = next++) {
      try {
        SimConfig cfg = base;
        cfg.policy = vars[k].policy;
        if (vars[k].tau) cfg.policy.tau = *vars[k].tau;
        cfg.seed = opt.common_random_numbers ? base.seed : derive_seed(base.seed, k);
        rows[k] = {vars[k].label, vars[k].tau, run(cfg)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(opt.threads, vars.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

SweepResult threshold_sweep(const SimConfig& base, const std::vector<double>& taus,
                            const ExperimentOptions& opt) {
  if (base.policy.kind != PolicyKind::HMWT) {
    throw Error(ErrorCode::InvalidParameter, "threshold sweep needs an h-MWT base policy");
  }
  std::vector<Variation> vars;
  for (double tau : taus) {
    vars.push_back({"hmwt", base.policy, tau});
  }
  SweepResult s;
  s.rows = run_experiment(base, vars, opt);
  s.tau_star = base.policy.h.tau_star;
  double best = 0.0;
  for (std::size_t k = 0; k < s.rows.size(); ++k) {
    if (k == 0 || s.rows[k].result.avg_cost < best) {
      best = s.rows[k].result.avg_cost;
      s.tau_best = *s.rows[k].tau;
    }
  }
  return s;
}

unsigned default_threads() {
  if (const char* env = std::getenv("BMATCH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace bmatch

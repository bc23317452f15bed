#include <gtest/gtest.h>

#include "bmatch/error.hpp"
#include "bmatch/random.hpp"
#include "bmatch/simulator.hpp"
#include "instances.hpp"

using namespace bmatch;

namespace {

SimConfig path_config(PolicyKind kind) {
  SimConfig cfg;
  cfg.graph = fixtures::path2();
  cfg.arrivals = fixtures::path2_arrivals(cfg.graph);
  cfg.cost = CostVector{{1, 2, 3, 4}};
  cfg.xi = workload_vector(cfg.graph, {0});
  cfg.policy.kind = kind;
  cfg.policy.cost = cfg.cost;
  cfg.policy.priority_order = {{1, 1}, {0, 0}, {1, 0}};
  cfg.policy.d = {0};
  const auto s = slopes(cfg.graph, cfg.cost, cfg.xi);
  const auto m = moments(cfg.graph, cfg.arrivals, cfg.xi);
  cfg.policy.h = build_params(m.delta, m.sigma2_delta, s, {}, cfg.xi, cfg.cost);
  cfg.policy.tau = cfg.policy.h.tau_star;
  cfg.horizon = 20000;
  cfg.seed = 11;
  return cfg;
}

SimConfig ring_config(PolicyKind kind) {
  SimConfig cfg;
  cfg.graph = fixtures::ring();
  cfg.arrivals = fixtures::ring_arrivals(cfg.graph);
  cfg.cost = fixtures::ring_cost();
  cfg.xi = workload_vector(cfg.graph, {2});
  cfg.policy.kind = kind;
  cfg.policy.cost = cfg.cost;
  cfg.policy.priority_order = cfg.graph.edges;
  cfg.policy.d = {2};
  const auto s = slopes(cfg.graph, cfg.cost, cfg.xi);
  const auto m = moments(cfg.graph, cfg.arrivals, cfg.xi);
  cfg.policy.h = build_params(m.delta, m.sigma2_delta, s, {}, cfg.xi, cfg.cost);
  cfg.policy.tau = cfg.policy.h.tau_star;
  cfg.horizon = 20000;
  cfg.check_invariants = true;
  return cfg;
}

}  // namespace

TEST(Simulator, SingleEdgeDeterministicArrivals) {
  SimConfig cfg;
  cfg.graph = fixtures::single_edge();
  cfg.arrivals = build_distribution(cfg.graph, {{{0, 0}, 1.0}});
  cfg.cost = CostVector{{1.0, 1.0}};
  cfg.policy.kind = PolicyKind::HMaxWeight;
  cfg.horizon = 1000;
  auto r = run(cfg);
  EXPECT_EQ(r.avg_cost, 0.0);
  EXPECT_EQ(r.max_buffer, 0);
  cfg.cost_basis = CostBasis::X;
  r = run(cfg);
  EXPECT_EQ(r.avg_cost, 2.0);
  EXPECT_EQ(r.stderr, 0.0);
}

TEST(Simulator, LoopMatchesHandRolledReplay) {
  auto cfg = path_config(PolicyKind::Priority);
  cfg.burn_in = 100;
  const auto r = run(cfg);
  const auto& g = cfg.graph;
  Rng arr(derive_seed(cfg.seed, 0));
  State q(4, 0);
  double total = 0.0;
  std::vector<double> sums(4, 0.0);
  for (std::uint64_t t = 0; t < cfg.horizon; ++t) {
    const Edge a = cfg.arrivals.sample(arr);
    State x = q;
    ++x[a.demand];
    ++x[g.supply_node(a.supply)];
    if (t >= 100) {
      total += cfg.cost(std::span<const int>(q));
      for (int k = 0; k < 4; ++k) sums[k] += q[k];
    }
    const auto u = priority_decide(g, cfg.policy.priority_order, x, a);
    const auto ind = u.induced(g);
    for (int k = 0; k < 4; ++k) q[k] = x[k] - ind[k];
  }
  const double n = static_cast<double>(cfg.horizon - 100);
  EXPECT_NEAR(r.avg_cost, total / n, 1e-9 * (1 + total / n));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(r.per_buffer_means[k], sums[k] / n, 1e-12);
}

TEST(Simulator, Reproducible) {
  for (auto k : {PolicyKind::HMWT, PolicyKind::RandomizedFlow}) {
    const auto cfg = path_config(k);
    const auto a = run(cfg);
    const auto b = run(cfg);
    EXPECT_EQ(a.avg_cost, b.avg_cost);
    EXPECT_EQ(a.stderr, b.stderr);
    EXPECT_EQ(a.per_buffer_means, b.per_buffer_means);
  }
}

TEST(Simulator, InvariantsHoldForEveryPolicy) {
  for (auto k : {PolicyKind::HMWT, PolicyKind::HMaxWeight, PolicyKind::GreedyMaxWeight,
                 PolicyKind::Priority, PolicyKind::RandomizedFlow}) {
    const auto r = run(ring_config(k));
    EXPECT_GE(r.avg_cost, 0.0) << to_string(k);
    if (k == PolicyKind::HMWT) EXPECT_EQ(r.idle_above_threshold, 0u);
  }
}

TEST(Simulator, IdlenessMatchesWorkloadBalance) {
  // W(t+1) = W(t) − I(t) + ξ·A(t+1), so the mean idleness equals −ξ·α up to a boundary term.
  auto cfg = ring_config(PolicyKind::HMWT);
  cfg.horizon = 200000;
  const auto r = run(cfg);
  const auto m = moments(cfg.graph, cfg.arrivals, cfg.xi);
  EXPECT_NEAR(r.idleness_rate, m.delta, 0.01);
}

TEST(Simulator, RejectsBadSettings) {
  auto cfg = path_config(PolicyKind::Priority);
  cfg.initial_state = {1, 0, 0, 0};
  EXPECT_THROW(run(cfg), Error);
  cfg.initial_state = {1, 0, 1};
  EXPECT_THROW(run(cfg), Error);
  cfg.initial_state.clear();
  cfg.burn_in = cfg.horizon;
  EXPECT_THROW(run(cfg), Error);
}

TEST(Simulator, ExperimentSeedsAndThreads) {
  auto base = ring_config(PolicyKind::HMWT);
  base.check_invariants = false;
  std::vector<Variation> vars{{"a", base.policy, 3.0}, {"b", base.policy, 3.0}};
  const auto plain = run_experiment(base, vars);
  EXPECT_NE(plain[0].result.avg_cost, plain[1].result.avg_cost);
  const auto crn = run_experiment(base, vars, {1, true});
  EXPECT_EQ(crn[0].result.avg_cost, crn[1].result.avg_cost);
  const auto threaded = run_experiment(base, vars, {2, false});
  for (std::size_t k = 0; k < vars.size(); ++k) {
    EXPECT_EQ(threaded[k].label, vars[k].label);
    EXPECT_EQ(threaded[k].result.avg_cost, plain[k].result.avg_cost);
  }
}

TEST(Simulator, SweepPicksArgmin) {
  const auto base = path_config(PolicyKind::HMWT);
  const auto s = threshold_sweep(base, {0.0, 0.5, 1.0, 3.0});
  double best = s.rows[0].result.avg_cost;
  double arg = 0.0;
  for (const auto& row : s.rows) {
    if (row.result.avg_cost < best) {
      best = row.result.avg_cost;
      arg = *row.tau;
    }
  }
  EXPECT_EQ(s.tau_best, arg);
  EXPECT_EQ(s.tau_star, base.policy.h.tau_star);
  EXPECT_THROW(threshold_sweep(path_config(PolicyKind::Priority), {0.0}), Error);
}

TEST(Simulator, SingletonSweepEqualsRun) {
  auto base = ring_config(PolicyKind::HMWT);
  base.check_invariants = false;
  const auto s = threshold_sweep(base, {2.5}, {1, true});
  base.policy.tau = 2.5;
  EXPECT_EQ(s.rows[0].result.avg_cost, run(base).avg_cost);
}

TEST(Simulator, MaxBufferGrowsSublinearly) {
  for (auto k : {PolicyKind::HMWT, PolicyKind::GreedyMaxWeight, PolicyKind::RandomizedFlow}) {
    auto cfg = ring_config(k);
    cfg.check_invariants = false;
    cfg.horizon = 100000;
    const int a = run(cfg).max_buffer;
    cfg.horizon = 200000;
    EXPECT_LT(run(cfg).max_buffer, 2 * a) << to_string(k);
  }
}

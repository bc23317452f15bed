#include <benchmark/benchmark.h>

#include "bmatch/arrivals.hpp"
#include "bmatch/effective_cost.hpp"
#include "bmatch/oracle.hpp"
#include "bmatch/policies.hpp"
#include "bmatch/simulator.hpp"
#include "bmatch/value_function.hpp"

namespace {

using namespace bmatch;

struct Ring {
  MatchingGraph g;
  ArrivalDistribution dist;
  CostVector c{{1, 2, 3, 3, 2, 1}};
  WorkloadVector xi;
  HParams h;

  Ring() {
    g.n_demand = 3;
    g.n_supply = 3;
    g.edges = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}};
    const double pd[] = {0.2, 0.2, 0.6};
    const double ps[] = {0.3035, 0.393, 0.3035};
    std::vector<std::pair<Edge, double>> m;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        g.arrival_pairs.push_back({i, j});
        m.push_back({{i, j}, pd[i] * ps[j]});
      }
    }
    dist = build_distribution(g, m);
    xi = workload_vector(g, {2});
    const auto mo = moments(g, dist, xi);
    h = build_params(mo.delta, mo.sigma2_delta, slopes(g, c, xi), {}, xi, c);
  }
};

void BM_HmwtDecide(benchmark::State& state) {
  Ring r;
  const State x{4, 7, 12, 9, 3, 11};
  for (auto _ : state) benchmark::DoNotOptimize(hmwt_decide(r.g, r.h, r.h.tau_star, x));
}
BENCHMARK(BM_HmwtDecide);

void BM_GradH(benchmark::State& state) {
  Ring r;
  const State x{4, 7, 12, 9, 3, 11};
  std::vector<double> grad(6);
  for (auto _ : state) {
    h_grad_into(r.h, x, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_GradH);

void BM_SimulatePolicy(benchmark::State& state) {
  Ring r;
  SimConfig cfg;
  cfg.graph = r.g;
  cfg.arrivals = r.dist;
  cfg.cost = r.c;
  cfg.xi = r.xi;
  cfg.horizon = 100000;
  cfg.policy.kind = static_cast<PolicyKind>(state.range(0));
  cfg.policy.h = r.h;
  cfg.policy.tau = r.h.tau_star;
  cfg.policy.cost = r.c;
  cfg.policy.priority_order = r.g.edges;
  cfg.policy.d = {2};
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg).avg_cost);
  state.SetItemsProcessed(state.iterations() * cfg.horizon);
}
BENCHMARK(BM_SimulatePolicy)
    ->Arg(static_cast<int>(PolicyKind::HMWT))
    ->Arg(static_cast<int>(PolicyKind::GreedyMaxWeight))
    ->Arg(static_cast<int>(PolicyKind::Priority))
    ->Arg(static_cast<int>(PolicyKind::RandomizedFlow))
    ->Unit(benchmark::kMillisecond);

void BM_RelaxationVI(benchmark::State& state) {
  const auto m = symmetric_relaxation(0.1, 1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(relaxation_value_iteration(m, 60).eta_hat_star);
  }
}
BENCHMARK(BM_RelaxationVI)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

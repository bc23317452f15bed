#pragma once

// Independent reference computations used only by tests. None of these call
// into the library code they are compared against.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "bmatch/arrivals.hpp"
#include "bmatch/flows.hpp"
#include "bmatch/graph.hpp"

namespace oracle {

using bmatch::Edge;
using bmatch::MatchingGraph;

/// Two-sided stabilizability: α_D < α_{Σ(D)} for every non-empty proper D ⊂ 𝒟
/// and α_S < α_{𝒟(S)} for every non-empty proper S ⊂ 𝒮.
inline bool ncond_two_sided(const MatchingGraph& g, const std::vector<double>& alpha) {
  const int nd = g.n_demand;
  const int ns = g.n_supply;
  for (std::uint32_t m = 1; m + 1 < (1u << nd); ++m) {
    double in = 0.0;
    std::set<int> nb;
    for (int i = 0; i < nd; ++i) {
      if (!(m >> i & 1u)) continue;
      in += alpha[i];
      for (const Edge& e : g.edges) {
        if (e.demand == i) nb.insert(e.supply);
      }
    }
    double out = 0.0;
    for (int j : nb) out += alpha[nd + j];
    if (!(in < out)) return false;
  }
  for (std::uint32_t m = 1; m + 1 < (1u << ns); ++m) {
    double in = 0.0;
    std::set<int> nb;
    for (int j = 0; j < ns; ++j) {
      if (!(m >> j & 1u)) continue;
      in += alpha[nd + j];
      for (const Edge& e : g.edges) {
        if (e.supply == j) nb.insert(e.demand);
      }
    }
    double out = 0.0;
    for (int i : nb) out += alpha[i];
    if (!(in < out)) return false;
  }
  return true;
}

/// Random connected bipartite graph: a random spanning tree plus extra edges.
inline MatchingGraph random_graph(std::mt19937_64& rng, int nd, int ns, double extra = 0.3) {
  MatchingGraph g;
  g.n_demand = nd;
  g.n_supply = ns;
  std::vector<int> nodes(nd + ns);
  for (int k = 0; k < nd + ns; ++k) nodes[k] = k;
  std::set<Edge> edges;
  // Attach each node to a random earlier node of the opposite side, in an
  // order that always has one available.
  std::vector<int> order;
  std::vector<int> dem(nd), sup(ns);
  for (int i = 0; i < nd; ++i) dem[i] = i;
  for (int j = 0; j < ns; ++j) sup[j] = j;
  std::shuffle(dem.begin(), dem.end(), rng);
  std::shuffle(sup.begin(), sup.end(), rng);
  std::vector<int> placed_d{dem[0]}, placed_s{sup[0]};
  edges.insert({dem[0], sup[0]});
  std::size_t a = 1, b = 1;
  while (a < dem.size() || b < sup.size()) {
    const bool take_d = b >= sup.size() || (a < dem.size() && rng() % 2 == 0);
    if (take_d) {
      const int s = placed_s[rng() % placed_s.size()];
      edges.insert({dem[a], s});
      placed_d.push_back(dem[a++]);
    } else {
      const int d = placed_d[rng() % placed_d.size()];
      edges.insert({d, sup[b]});
      placed_s.push_back(sup[b++]);
    }
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < nd; ++i) {
    for (int j = 0; j < ns; ++j) {
      if (u(rng) < extra) edges.insert({i, j});
    }
  }
  g.edges.assign(edges.begin(), edges.end());
  g.arrival_pairs = g.edges;
  return g;
}

/// Arrival masses on every edge, drawn uniformly then normalized.
inline std::vector<std::pair<Edge, double>> random_edge_masses(std::mt19937_64& rng,
                                                               const MatchingGraph& g) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<std::pair<Edge, double>> m;
  double total = 0.0;
  for (const Edge& e : g.edges) {
    m.push_back({e, u(rng)});
    total += m.back().second;
  }
  for (auto& [e, p] : m) p /= total;
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < m.size(); ++k) s += m[k].second;
  m.back().second = 1.0 - s;
  return m;
}

/// Exhaustive minimum a–f cut of a flow network.
inline double min_cut(const bmatch::FlowNetwork& net) {
  const int inner = net.n_left + net.n_right;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t m = 0; m < (1u << inner); ++m) {
    auto on_source_side = [&](int v) {
      if (v == net.source()) return true;
      if (v == net.sink()) return false;
      return static_cast<bool>(m >> v & 1u);
    };
    double cut = 0.0;
    for (const auto& a : net.arcs) {
      if (on_source_side(a.from) && !on_source_side(a.to)) cut += a.capacity;
    }
    best = std::min(best, cut);
  }
  return best;
}

/// Flow validity from first principles: non-negativity, capacities,
/// conservation at inner nodes, and the stated value.
inline bool flow_ok(const bmatch::FlowNetwork& net, const std::vector<double>& flow, double value,
                    double tol) {
  std::vector<double> in(net.n_nodes(), 0.0), out(net.n_nodes(), 0.0);
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    const auto& a = net.arcs[k];
    if (flow[k] < -tol) return false;
    if (std::isfinite(a.capacity) && flow[k] > a.capacity + tol) return false;
    out[a.from] += flow[k];
    in[a.to] += flow[k];
  }
  for (int v = 0; v < net.n_left + net.n_right; ++v) {
    if (std::abs(in[v] - out[v]) > tol) return false;
  }
  return std::abs(out[net.source()] - value) <= tol && std::abs(in[net.sink()] - value) <= tol;
}

/// Central finite-difference gradient.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = x[k];
    x[k] = v + step;
    const double hi = f(x);
    x[k] = v - step;
    const double lo = f(x);
    x[k] = v;
    g[k] = (hi - lo) / (2.0 * step);
  }
  return g;
}

/// Every count vector in [0, max_matches]^E, filtered by Σ ≤ max_matches and u ≤ x.
inline std::vector<std::vector<int>> all_decisions(const MatchingGraph& g,
                                                   const std::vector<int>& x) {
  const int ne = static_cast<int>(g.edges.size());
  const int base = g.max_matches + 1;
  long total = 1;
  for (int e = 0; e < ne; ++e) total *= base;
  std::vector<std::vector<int>> out;
  for (long code = 0; code < total; ++code) {
    std::vector<int> n(ne);
    long c = code;
    int sum = 0;
    for (int e = 0; e < ne; ++e) {
      n[e] = static_cast<int>(c % base);
      c /= base;
      sum += n[e];
    }
    if (sum > g.max_matches) continue;
    std::vector<int> used(x.size(), 0);
    for (int e = 0; e < ne; ++e) {
      used[g.edges[e].demand] += n[e];
      used[g.n_demand + g.edges[e].supply] += n[e];
    }
    bool ok = true;
    for (std::size_t k = 0; k < x.size(); ++k) ok = ok && used[k] <= x[k];
    if (ok) out.push_back(n);
  }
  return out;
}

/// Stationary mean cost of the reflected lattice walk Φ(t+1) = max(Φ(t) + inc, −τ),
/// with cost evaluated at Φ + δ + inc, by power iteration on a truncated chain.
inline double threshold_cost_power(const std::array<double, 3>& p, double delta, double tau,
                                   const std::function<double(double)>& cbar, int levels,
                                   int iters) {
  std::vector<double> pi(levels, 0.0), next(levels);
  pi[0] = 1.0;
  for (int it = 0; it < iters; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int k = 0; k < levels; ++k) {
      next[std::max(k - 1, 0)] += pi[k] * p[0];
      next[k] += pi[k] * p[1];
      next[std::min(k + 1, levels - 1)] += pi[k] * p[2];
    }
    pi.swap(next);
  }
  double cost = 0.0;
  for (int k = 0; k < levels; ++k) {
    for (int inc = -1; inc <= 1; ++inc) cost += pi[k] * p[inc + 1] * cbar(-tau + k + delta + inc);
  }
  return cost;
}

}  // namespace oracle

#include "bmatch/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "bmatch/error.hpp"

namespace bmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FlowNetwork build(const std::vector<int>& left, const std::vector<int>& right,
                  const std::vector<std::pair<int, int>>& links, std::span<const double> cap) {
  FlowNetwork net;
  net.n_left = static_cast<int>(left.size());
  net.n_right = static_cast<int>(right.size());
  net.state_index = left;
  net.state_index.insert(net.state_index.end(), right.begin(), right.end());
  for (int l = 0; l < net.n_left; ++l) net.arcs.push_back({net.source(), l, cap[left[l]]});
  for (const auto& [l, r] : links) net.arcs.push_back({l, net.n_left + r, kInf});
  for (int r = 0; r < net.n_right; ++r) {
    net.arcs.push_back({net.n_left + r, net.sink(), cap[right[r]]});
  }
  return net;
}

FlowNetwork build_oriented(const MatchingGraph& g, const DemandSet& d, const std::vector<int>& s,
                           std::span<const double> alpha, bool reversed) {
  if (alpha.size() != static_cast<std::size_t>(g.dim())) {
    throw Error(ErrorCode::AlphaShapeMismatch, "alpha length differs from state dimension");
  }
  std::vector<int> left;
  std::vector<int> right;
  for (int i : d) left.push_back(i);
  for (int j : s) right.push_back(g.supply_node(j));
  std::vector<std::pair<int, int>> links;
  for (const Edge& e : g.edges) {
    auto li = std::find(d.begin(), d.end(), e.demand);
    auto rj = std::find(s.begin(), s.end(), e.supply);
    if (li == d.end() || rj == s.end()) continue;
    const int a = static_cast<int>(li - d.begin());
    const int b = static_cast<int>(rj - s.begin());
    links.emplace_back(reversed ? b : a, reversed ? a : b);
  }
  if (reversed) std::swap(left, right);
  return build(left, right, links, alpha);
}

double sum_at(std::span<const double> alpha, const std::vector<int>& idx) {
  double t = 0.0;
  for (int k : idx) t += alpha[k];
  return t;
}

/// min over non-empty proper L' ⊂ L of α(N(L')) − α(L') in the network's bipartite part.
double hall_slack(const FlowNetwork& net, std::span<const double> alpha) {
  if (net.n_left > 20) throw Error(ErrorCode::SubsetTooLarge, "Hall slack enumeration caps at 20");
  std::vector<std::uint32_t> nbr(net.n_left, 0);
  for (const auto& a : net.arcs) {
    if (a.from < net.n_left && a.to >= net.n_left && a.to < net.n_left + net.n_right) {
      nbr[a.from] |= 1u << (a.to - net.n_left);
    }
  }
  double best = kInf;
  for (std::uint32_t m = 1; m + 1 < (1u << net.n_left); ++m) {
    std::uint32_t n = 0;
    double in = 0.0;
    for (int l = 0; l < net.n_left; ++l) {
      if (m & (1u << l)) {
        n |= nbr[l];
        in += alpha[net.state_index[l]];
      }
    }
    double out = 0.0;
    for (int r = 0; r < net.n_right; ++r) {
      if (n & (1u << r)) out += alpha[net.state_index[net.n_left + r]];
    }
    best = std::min(best, out - in);
  }
  return best;
}

PositiveFlow positive_flow(FlowNetwork net, std::span<const double> alpha,
                           std::optional<double> delta_lower) {
  const double target = [&] {
    double t = 0.0;
    for (int l = 0; l < net.n_left; ++l) t += alpha[net.state_index[l]];
    return t;
  }();
  std::vector<int> edge_arcs;
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    if (std::isinf(net.arcs[k].capacity)) edge_arcs.push_back(static_cast<int>(k));
  }
  const double n_edges = static_cast<double>(edge_arcs.size());
  if (edge_arcs.empty()) throw Error(ErrorCode::DisconnectedRestriction, "no edges in restriction");

  const Flow plain = max_flow(net);
  if (plain.value < target - 1e-10) {
    throw Error(ErrorCode::NCondViolated, "maximum flow falls short of the source rate");
  }

  double min_alpha = kInf;
  for (int k : net.state_index) min_alpha = std::min(min_alpha, alpha[k]);
  const double slack = delta_lower.value_or(net.n_left > 1 ? hall_slack(net, alpha) : kInf);
  double nu = std::min(slack / 2.0, min_alpha) / n_edges;
  if (!(nu > 0.0)) throw Error(ErrorCode::NCondViolated, "no positive slack for an edge floor");

  for (int attempt = 0; attempt < 60; ++attempt, nu /= 2.0) {
    // Reduced capacities α̃ = (α − deg·ν)/(1 − |E|ν) after reserving ν per edge.
    const double scale = 1.0 - n_edges * nu;
    if (!(scale > 0.0)) continue;
    FlowNetwork reduced = net;
    std::vector<int> degree(net.n_left + net.n_right, 0);
    for (int k : edge_arcs) {
      ++degree[net.arcs[k].from];
      ++degree[net.arcs[k].to];
    }
    bool ok = true;
    for (auto& a : reduced.arcs) {
      if (std::isinf(a.capacity)) continue;
      const int node = a.from == net.source() ? a.to : a.from;
      a.capacity = (a.capacity - degree[node] * nu) / scale;
      if (a.capacity < -1e-15) ok = false;
      a.capacity = std::max(a.capacity, 0.0);
    }
    if (!ok) continue;
    double reduced_target = 0.0;
    for (const auto& a : reduced.arcs) {
      if (a.from == reduced.source()) reduced_target += a.capacity;
    }
    const Flow inner = max_flow(reduced);
    if (inner.value < reduced_target - 1e-12) continue;

    PositiveFlow out;
    out.net = net;
    out.nu = nu;
    out.flow.flow.assign(net.arcs.size(), 0.0);
    for (std::size_t k = 0; k < net.arcs.size(); ++k) {
      const auto& a = net.arcs[k];
      double reserve = 0.0;
      if (std::isinf(a.capacity)) {
        reserve = nu;
      } else {
        reserve = degree[a.from == net.source() ? a.to : a.from] * nu;
      }
      out.flow.flow[k] = reserve + scale * inner.flow[k];
    }
    out.flow.value = 0.0;
    for (std::size_t k = 0; k < net.arcs.size(); ++k) {
      if (net.arcs[k].from == net.source()) out.flow.value += out.flow.flow[k];
    }
    out.gamma = kInf;
    for (int k : edge_arcs) out.gamma = std::min(out.gamma, out.flow.flow[k]);
    return out;
  }
  throw Error(ErrorCode::NCondViolated, "could not build a strictly positive flow");
}

}  // namespace

FlowNetwork make_network(const MatchingGraph& g, const DemandSet& d, const std::vector<int>& s,
                         std::span<const double> alpha) {
  return build_oriented(g, d, s, alpha, false);
}

FlowNetwork make_reversed_network(const MatchingGraph& g, const DemandSet& d,
                                  const std::vector<int>& s, std::span<const double> alpha) {
  return build_oriented(g, d, s, alpha, true);
}

Flow max_flow(const FlowNetwork& net) {
  const int n = net.n_nodes();
  struct Res {
    int to;
    int rev;
    double cap;
    int arc;  // original arc index for forward residuals, −1 for reverse
  };
  std::vector<std::vector<Res>> adj(n);
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    const auto& a = net.arcs[k];
    adj[a.from].push_back({a.to, static_cast<int>(adj[a.to].size()), a.capacity, static_cast<int>(k)});
    adj[a.to].push_back({a.from, static_cast<int>(adj[a.from].size()) - 1, 0.0, -1});
  }
  Flow f;
  f.flow.assign(net.arcs.size(), 0.0);
  const int s = net.source();
  const int t = net.sink();
  while (true) {
    std::vector<std::pair<int, int>> parent(n, {-1, -1});
    parent[s] = {s, -1};
    std::queue<int> q;
    q.push(s);
    while (!q.empty() && parent[t].first < 0) {
      const int v = q.front();
      q.pop();
      for (int k = 0; k < static_cast<int>(adj[v].size()); ++k) {
        const auto& r = adj[v][k];
        if (r.cap > 1e-15 && parent[r.to].first < 0) {
          parent[r.to] = {v, k};
          q.push(r.to);
        }
      }
    }
    if (parent[t].first < 0) break;
    double push = kInf;
    for (int v = t; v != s; v = parent[v].first) {
      push = std::min(push, adj[parent[v].first][parent[v].second].cap);
    }
    if (std::isinf(push)) throw Error(ErrorCode::InvalidParameter, "unbounded flow");
    for (int v = t; v != s; v = parent[v].first) {
      auto& r = adj[parent[v].first][parent[v].second];
      r.cap -= push;
      adj[v][r.rev].cap += push;
    }
    f.value += push;
  }
  for (int v = 0; v < n; ++v) {
    for (const auto& r : adj[v]) {
      if (r.arc < 0) continue;
      // Flow on an arc equals the residual capacity of its reverse edge.
      f.flow[r.arc] = adj[r.to][r.rev].cap;
    }
  }
  return f;
}

bool flow_is_valid(const FlowNetwork& net, const Flow& f, double tol) {
  if (f.flow.size() != net.arcs.size()) return false;
  std::vector<double> excess(net.n_nodes(), 0.0);
  double out_of_source = 0.0;
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    const auto& a = net.arcs[k];
    if (f.flow[k] < -tol || f.flow[k] > a.capacity + tol) return false;
    excess[a.from] -= f.flow[k];
    excess[a.to] += f.flow[k];
    if (a.from == net.source()) out_of_source += f.flow[k];
  }
  for (int v = 0; v < net.n_left + net.n_right; ++v) {
    if (std::abs(excess[v]) > tol) return false;
  }
  return std::abs(out_of_source - f.value) <= tol && std::abs(excess[net.sink()] - f.value) <= tol;
}

PositiveFlow strictly_positive_flow(const MatchingGraph& g, const DemandSet& d,
                                    std::span<const double> alpha,
                                    std::optional<double> delta_lower) {
  const auto ncond = check_ncond(g, alpha);
  if (!ncond.satisfied) throw Error(ErrorCode::NCondViolated, "arrival rates violate NCond");
  const auto s = g.supply_neighbors(d);
  if (!restricted_connected(g, d, s)) {
    throw Error(ErrorCode::DisconnectedRestriction, "graph restricted to D and its neighbours is disconnected");
  }
  auto out = positive_flow(make_network(g, d, s, alpha), alpha, delta_lower);
  if (std::abs(out.flow.value - sum_at(alpha, d)) > 1e-10) {
    throw Error(ErrorCode::NCondViolated, "flow value differs from the demand rate");
  }
  return out;
}

PositiveFlow strictly_positive_flow_complement(const MatchingGraph& g, const DemandSet& d,
                                               std::span<const double> alpha,
                                               std::optional<double> delta_lower) {
  const auto ncond = check_ncond(g, alpha);
  if (!ncond.satisfied) throw Error(ErrorCode::NCondViolated, "arrival rates violate NCond");
  const auto sigma = g.supply_neighbors(d);
  DemandSet dc;
  for (int i = 0; i < g.n_demand; ++i) {
    if (!std::binary_search(d.begin(), d.end(), i)) dc.push_back(i);
  }
  std::vector<int> sc;
  for (int j = 0; j < g.n_supply; ++j) {
    if (!std::binary_search(sigma.begin(), sigma.end(), j)) sc.push_back(j);
  }
  if (dc.empty() || sc.empty()) {
    throw Error(ErrorCode::EmptyComplement, "complement component is empty");
  }
  if (!restricted_connected(g, dc, sc)) {
    throw Error(ErrorCode::DisconnectedRestriction, "graph restricted to the complements is disconnected");
  }
  std::vector<int> sc_nodes;
  for (int j : sc) sc_nodes.push_back(g.supply_node(j));
  auto out = positive_flow(make_reversed_network(g, dc, sc, alpha), alpha, delta_lower);
  if (std::abs(out.flow.value - sum_at(alpha, sc_nodes)) > 1e-10) {
    throw Error(ErrorCode::NCondViolated, "flow value differs from the supply rate");
  }
  return out;
}

}  // namespace bmatch

#include "bmatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bmatch/error.hpp"

namespace bmatch {

namespace {

constexpr int kMaxEnumeratedDemand = 20;

std::string set_to_string(const std::vector<int>& nodes, int n_demand) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k) os << ',';
    const int v = nodes[k];
    if (v < n_demand) {
      os << 'd' << v + 1;
    } else {
      os << 's' << v - n_demand + 1;
    }
  }
  os << '}';
  return os.str();
}

DemandSet mask_to_set(std::uint32_t mask, int n) {
  DemandSet d;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) d.push_back(i);
  }
  return d;
}

}  // namespace

std::vector<int> MatchingGraph::supply_neighbors(int i) const {
  std::vector<int> out;
  for (const Edge& e : edges) {
    if (e.demand == i) out.push_back(e.supply);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> MatchingGraph::demand_neighbors(int j) const {
  std::vector<int> out;
  for (const Edge& e : edges) {
    if (e.supply == j) out.push_back(e.demand);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> MatchingGraph::supply_neighbors(const DemandSet& d) const {
  std::vector<int> out;
  for (const Edge& e : edges) {
    if (std::binary_search(d.begin(), d.end(), e.demand)) out.push_back(e.supply);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<int> MatchingGraph::edge_index(Edge e) const {
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k] == e) return static_cast<int>(k);
  }
  return std::nullopt;
}

bool MatchingGraph::is_arrival_pair(Edge e) const {
  return std::find(arrival_pairs.begin(), arrival_pairs.end(), e) != arrival_pairs.end();
}

void validate_graph(const MatchingGraph& g) {
  if (g.n_demand < 1 || g.n_supply < 1) {
    throw Error(ErrorCode::IndexOutOfRange, "need at least one demand and one supply class");
  }
  if (g.edges.empty()) throw Error(ErrorCode::EmptyEdgeSet, "no matching edges");
  if (g.arrival_pairs.empty()) throw Error(ErrorCode::EmptyEdgeSet, "no arrival pairs");
  auto check_range = [&](const Edge& e, const char* what) {
    if (e.demand < 0 || e.demand >= g.n_demand || e.supply < 0 || e.supply >= g.n_supply) {
      std::ostringstream os;
      os << what << " (" << e.demand + 1 << ',' << e.supply + 1 << ") out of range";
      throw Error(ErrorCode::IndexOutOfRange, os.str());
    }
  };
  for (const Edge& e : g.edges) check_range(e, "edge");
  for (const Edge& e : g.arrival_pairs) check_range(e, "arrival pair");
  if (g.max_matches < 4) {
    throw Error(ErrorCode::InvalidMaxMatches, "max_matches must be at least 4");
  }

  // Union-find over demand nodes [0, n_D) and supply nodes [n_D, ℓ).
  const int n = g.dim();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Edge& e : g.edges) {
    const int a = find(e.demand);
    const int b = find(g.supply_node(e.supply));
    if (a != b) parent[a] = b;
  }
  const int root0 = find(0);
  std::vector<int> other;
  for (int v = 0; v < n; ++v) {
    if (find(v) != root0) other.push_back(v);
  }
  if (!other.empty()) {
    // Report the component of the first node not reachable from d1.
    const int r = find(other.front());
    std::vector<int> component;
    for (int v : other) {
      if (find(v) == r) component.push_back(v);
    }
    throw Error(ErrorCode::DisconnectedGraph,
                "component " + set_to_string(component, g.n_demand) + " is not connected to d1");
  }
}

bool restricted_connected(const MatchingGraph& g, const DemandSet& d, const std::vector<int>& s) {
  const int n = static_cast<int>(d.size() + s.size());
  if (n == 0) return false;
  // Local numbering: demand members first.
  auto local = [&](bool demand, int idx) -> int {
    if (demand) {
      auto it = std::lower_bound(d.begin(), d.end(), idx);
      return (it != d.end() && *it == idx) ? static_cast<int>(it - d.begin()) : -1;
    }
    auto it = std::lower_bound(s.begin(), s.end(), idx);
    return (it != s.end() && *it == idx) ? static_cast<int>(d.size() + (it - s.begin())) : -1;
  };
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Edge& e : g.edges) {
    const int a = local(true, e.demand);
    const int b = local(false, e.supply);
    if (a < 0 || b < 0) continue;
    const int ra = find(a);
    const int rb = find(b);
    if (ra != rb) parent[ra] = rb;
  }
  const int r = find(0);
  for (int v = 1; v < n; ++v) {
    if (find(v) != r) return false;
  }
  return true;
}

int balance(const MatchingGraph& g, std::span<const int> x) {
  int b = 0;
  for (int i = 0; i < g.n_demand; ++i) b += x[i];
  for (int j = 0; j < g.n_supply; ++j) b -= x[g.supply_node(j)];
  return b;
}

int WorkloadVector::dot(std::span<const int> x) const {
  int s = 0;
  for (std::size_t k = 0; k < xi.size(); ++k) s += xi[k] * x[k];
  return s;
}

double WorkloadVector::dot(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) s += xi[k] * x[k];
  return s;
}

WorkloadVector workload_vector(const MatchingGraph& g, const DemandSet& d_in) {
  DemandSet d = d_in;
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  if (d.empty() || static_cast<int>(d.size()) >= g.n_demand) {
    throw Error(ErrorCode::EmptyOrFullSubset, "workload set D must be non-empty and proper");
  }
  for (int i : d) {
    if (i < 0 || i >= g.n_demand) throw Error(ErrorCode::IndexOutOfRange, "demand index in D");
  }
  WorkloadVector w;
  w.demand_set = d;
  w.supply_set = g.supply_neighbors(d);
  w.xi.assign(g.dim(), 0);
  for (int i : d) w.xi[i] = 1;
  for (int j : w.supply_set) w.xi[g.supply_node(j)] = -1;
  return w;
}

namespace {

void check_alpha(const MatchingGraph& g, std::span<const double> alpha) {
  if (static_cast<int>(alpha.size()) != g.dim()) {
    throw Error(ErrorCode::AlphaShapeMismatch, "alpha must have one entry per buffer");
  }
  double sd = 0.0;
  double ss = 0.0;
  for (int i = 0; i < g.n_demand; ++i) {
    if (alpha[i] < 0.0) throw Error(ErrorCode::AlphaShapeMismatch, "negative arrival rate");
    sd += alpha[i];
  }
  for (int j = 0; j < g.n_supply; ++j) {
    if (alpha[g.supply_node(j)] < 0.0) {
      throw Error(ErrorCode::AlphaShapeMismatch, "negative arrival rate");
    }
    ss += alpha[g.supply_node(j)];
  }
  if (std::abs(sd - ss) > 1e-9 * std::max(1.0, sd)) {
    throw Error(ErrorCode::AlphaNotNormalized, "demand and supply rates have different totals");
  }
}

}  // namespace

NCondResult check_ncond(const MatchingGraph& g, std::span<const double> alpha) {
  check_alpha(g, alpha);
  if (g.n_demand > kMaxEnumeratedDemand || g.n_supply > 31) {
    throw Error(ErrorCode::SubsetTooLarge, "subset enumeration limited to 20 demand classes");
  }
  std::vector<std::uint32_t> nbr_mask(g.n_demand, 0);
  for (const Edge& e : g.edges) nbr_mask[e.demand] |= 1u << e.supply;

  NCondResult res;
  res.margin = -std::numeric_limits<double>::infinity();
  std::uint32_t best = 0;
  const std::uint32_t full = (1u << g.n_demand) - 1u;
  for (std::uint32_t m = 1; m < full; ++m) {
    double dsum = 0.0;
    std::uint32_t smask = 0;
    for (int i = 0; i < g.n_demand; ++i) {
      if (m & (1u << i)) {
        dsum += alpha[i];
        smask |= nbr_mask[i];
      }
    }
    double ssum = 0.0;
    for (int j = 0; j < g.n_supply; ++j) {
      if (smask & (1u << j)) ssum += alpha[g.supply_node(j)];
    }
    const double v = dsum - ssum;
    if (v > res.margin) {
      res.margin = v;
      best = m;
    }
  }
  res.satisfied = res.margin < 0.0;
  if (!res.satisfied) res.witness = mask_to_set(best, g.n_demand);
  return res;
}

int MatchingDecision::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

bool MatchingDecision::is_zero() const {
  return std::all_of(counts.begin(), counts.end(), [](int n) { return n == 0; });
}

std::vector<int> MatchingDecision::induced(const MatchingGraph& g) const {
  std::vector<int> u(g.dim(), 0);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    u[g.edges[k].demand] += counts[k];
    u[g.supply_node(g.edges[k].supply)] += counts[k];
  }
  return u;
}

namespace {

void enumerate(const MatchingGraph& g, std::size_t k, int budget, std::vector<int>& avail,
               std::vector<int>& counts, std::vector<MatchingDecision>& out) {
  if (k == g.edges.size()) {
    out.push_back(MatchingDecision{counts});
    return;
  }
  const int di = g.edges[k].demand;
  const int sj = g.supply_node(g.edges[k].supply);
  const int hi = std::min({budget, avail[di], avail[sj]});
  for (int n = hi; n >= 0; --n) {
    counts[k] = n;
    avail[di] -= n;
    avail[sj] -= n;
    enumerate(g, k + 1, budget - n, avail, counts, out);
    avail[di] += n;
    avail[sj] += n;
  }
  counts[k] = 0;
}

}  // namespace

std::vector<MatchingDecision> feasible_decisions(const MatchingGraph& g, std::span<const int> x) {
  std::vector<int> avail(x.begin(), x.end());
  std::vector<int> counts(g.edges.size(), 0);
  std::vector<MatchingDecision> out;
  enumerate(g, 0, g.max_matches, avail, counts, out);
  return out;
}

bool is_feasible(const MatchingGraph& g, std::span<const int> x, const MatchingDecision& u) {
  if (u.counts.size() != g.edges.size()) return false;
  if (std::any_of(u.counts.begin(), u.counts.end(), [](int n) { return n < 0; })) return false;
  if (u.total() > g.max_matches) return false;
  const auto v = u.induced(g);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] > x[k]) return false;
  }
  return true;
}

State step(const MatchingGraph& g, std::span<const int> x, const MatchingDecision& u, Edge a) {
  if (!is_feasible(g, x, u)) {
    throw Error(ErrorCode::InfeasibleDecision, "decision exceeds buffer contents or match budget");
  }
  if (!g.is_arrival_pair(a)) {
    throw Error(ErrorCode::InvalidArrival, "arrival is not an arrival pair of the graph");
  }
  State next(x.begin(), x.end());
  const auto v = u.induced(g);
  for (std::size_t k = 0; k < next.size(); ++k) next[k] -= v[k];
  next[a.demand] += 1;
  next[g.supply_node(a.supply)] += 1;
  return next;
}

int idleness(const MatchingGraph& g, const WorkloadVector& xi, const MatchingDecision& u) {
  return -xi.dot(u.induced(g));
}

}  // namespace bmatch

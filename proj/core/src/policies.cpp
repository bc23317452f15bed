#include "bmatch/policies.hpp"

#include <algorithm>
#include <cmath>

#include "bmatch/error.hpp"
#include "bmatch/flows.hpp"

namespace bmatch {

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::HMWT: return "hmwt";
    case PolicyKind::HMaxWeight: return "hmaxweight";
    case PolicyKind::GreedyMaxWeight: return "greedy";
    case PolicyKind::Priority: return "priority";
    case PolicyKind::RandomizedFlow: return "randomized";
  }
  return "?";
}

PolicyKind parse_policy_kind(const std::string& s) {
  for (auto k : {PolicyKind::HMWT, PolicyKind::HMaxWeight, PolicyKind::GreedyMaxWeight,
                 PolicyKind::Priority, PolicyKind::RandomizedFlow}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown policy kind '" + s + "'");
}

namespace {

struct Search {
  const MatchingGraph* g;
  std::span<const double> score;
  std::span<const char> cross;
  std::vector<int> room;      // remaining buffer per state position
  std::vector<int> counts;
  std::vector<int> best;
  double best_score = 0.0;
  int best_total = 0;
  int budget = 0;
  int cross_left = 0;
  std::vector<int> order;     // candidate edges, ascending index

  bool better(double s, int total) const {
    const double tol = 1e-12 * (1.0 + std::abs(s) + std::abs(best_score));
    if (s > best_score + tol) return true;
    if (s < best_score - tol) return false;
    if (total != best_total) return total > best_total;
    return counts > best;
  }

  void run(std::size_t pos, double s, int total) {
    if (pos == order.size()) {
      if (better(s, total)) {
        best = counts;
        best_score = s;
        best_total = total;
      }
      return;
    }
    const int e = order[pos];
    const Edge& ed = g->edges[e];
    const int si = ed.demand;
    const int sj = g->supply_node(ed.supply);
    int most = std::min({room[si], room[sj], budget});
    if (cross[e]) most = std::min(most, cross_left);
    for (int n = most; n >= 0; --n) {
      counts[e] = n;
      room[si] -= n;
      room[sj] -= n;
      budget -= n;
      if (cross[e]) cross_left -= n;
      run(pos + 1, s + n * score[e], total + n);
      room[si] += n;
      room[sj] += n;
      budget += n;
      if (cross[e]) cross_left += n;
    }
    counts[e] = 0;
  }
};

void add_match(const MatchingGraph& g, MatchingDecision& u, int demand, int supply) {
  const auto e = g.edge_index({demand, supply});
  if (!e) throw Error(ErrorCode::InfeasibleDecision, "match along a non-edge");
  ++u.counts[*e];
}

}  // namespace

MatchingDecision best_decision(const MatchingGraph& g, std::span<const int> x,
                               std::span<const double> edge_score, std::span<const char> cross,
                               int max_cross) {
  Search s;
  s.g = &g;
  s.score = edge_score;
  s.cross = cross;
  s.room.assign(x.begin(), x.end());
  s.counts.assign(g.edges.size(), 0);
  s.best = s.counts;
  s.budget = g.max_matches;
  s.cross_left = std::max(max_cross, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double tol = 1e-12 * (1.0 + std::abs(edge_score[e]));
    if (edge_score[e] < -tol) continue;
    if (cross[e] && s.cross_left == 0) continue;
    const Edge& ed = g.edges[e];
    if (x[ed.demand] == 0 || x[g.supply_node(ed.supply)] == 0) continue;
    s.order.push_back(static_cast<int>(e));
  }
  s.run(0, 0.0, 0);
  return MatchingDecision{std::move(s.best)};
}

MatchingDecision hmwt_decide(const MatchingGraph& g, const HParams& h, double tau,
                             std::span<const int> x) {
  std::vector<double> grad(x.size());
  h_grad_into(h, x, grad);
  std::vector<double> score(g.edges.size());
  std::vector<char> cross(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int si = g.edges[e].demand;
    const int sj = g.supply_node(g.edges[e].supply);
    score[e] = grad[si] + grad[sj];
    cross[e] = (h.xi.xi[si] + h.xi.xi[sj]) < 0 ? 1 : 0;
  }
  const int w = h.xi.dot(x);
  int max_cross = 0;
  if (w < -tau) max_cross = static_cast<int>(std::floor(-w - tau + 1e-9));
  return best_decision(g, x, score, cross, max_cross);
}

MatchingDecision h_maxweight_decide(const MatchingGraph& g, std::span<const double> weights,
                                    std::span<const int> x) {
  std::vector<double> score(g.edges.size());
  const std::vector<char> cross(g.edges.size(), 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int si = g.edges[e].demand;
    const int sj = g.supply_node(g.edges[e].supply);
    score[e] = 2.0 * (weights[si] * x[si] + weights[sj] * x[sj]);
  }
  return best_decision(g, x, score, cross, 0);
}

MatchingDecision greedy_maxweight_decide(const MatchingGraph& g, const CostVector& c,
                                         std::span<const int> x, Edge arrival) {
  MatchingDecision u{std::vector<int>(g.edges.size(), 0)};
  std::vector<int> room(x.begin(), x.end());
  const int ai = arrival.demand;
  const int aj = g.supply_node(arrival.supply);
  bool supply_used = false;

  int pick = -1;
  double best = 0.0;
  for (int j : g.supply_neighbors(ai)) {
    const int sj = g.supply_node(j);
    if (room[sj] < 1) continue;
    const double v = c.c[sj] * room[sj];
    if (pick < 0 || v > best) {
      pick = j;
      best = v;
    }
  }
  if (pick >= 0 && room[ai] >= 1) {
    add_match(g, u, ai, pick);
    --room[ai];
    --room[g.supply_node(pick)];
    supply_used = g.supply_node(pick) == aj;
  }
  if (supply_used) return u;

  pick = -1;
  for (int i : g.demand_neighbors(arrival.supply)) {
    if (room[i] < 1) continue;
    const double v = c.c[i] * room[i];
    if (pick < 0 || v > best) {
      pick = i;
      best = v;
    }
  }
  if (pick >= 0 && room[aj] >= 1) add_match(g, u, pick, arrival.supply);
  return u;
}

MatchingDecision priority_decide(const MatchingGraph& g, std::span<const Edge> order,
                                 std::span<const int> x, Edge arrival) {
  MatchingDecision u{std::vector<int>(g.edges.size(), 0)};
  std::vector<int> room(x.begin(), x.end());
  const int ai = arrival.demand;
  const int aj = g.supply_node(arrival.supply);
  bool supply_used = false;
  for (const Edge& e : order) {
    if (e.demand != ai) continue;
    const int sj = g.supply_node(e.supply);
    if (room[ai] >= 1 && room[sj] >= 1) {
      add_match(g, u, e.demand, e.supply);
      --room[ai];
      --room[sj];
      supply_used = sj == aj;
      break;
    }
  }
  if (supply_used) return u;
  for (const Edge& e : order) {
    if (e.supply != arrival.supply) continue;
    if (room[e.demand] >= 1 && room[aj] >= 1) {
      add_match(g, u, e.demand, e.supply);
      break;
    }
  }
  return u;
}

FlowPlan make_flow_plan(const MatchingGraph& g, std::span<const double> alpha, const DemandSet& d,
                        bool split_components) {
  FlowPlan plan;
  plan.partners.resize(g.dim());
  plan.alpha.assign(alpha.begin(), alpha.end());
  plan.throughput.assign(g.dim(), 0.0);
  auto absorb = [&](const PositiveFlow& pf) {
    const auto& net = pf.net;
    for (std::size_t k = 0; k < net.arcs.size(); ++k) {
      const auto& a = net.arcs[k];
      const double f = pf.flow.flow[k];
      if (a.from == net.source()) {
        plan.throughput[net.state_index[a.to]] = f;
      } else if (a.to == net.sink()) {
        plan.throughput[net.state_index[a.from]] = f;
      } else {
        const int p = net.state_index[a.from];
        const int q = net.state_index[a.to];
        plan.partners[p].emplace_back(q, f);
        plan.partners[q].emplace_back(p, f);
      }
    }
  };
  if (split_components) {
    absorb(strictly_positive_flow(g, d, alpha));
    absorb(strictly_positive_flow_complement(g, d, alpha));
  } else {
    DemandSet all(g.n_demand);
    for (int i = 0; i < g.n_demand; ++i) all[i] = i;
    absorb(strictly_positive_flow(g, all, alpha));
  }
  for (auto& p : plan.partners) std::sort(p.begin(), p.end());
  return plan;
}

std::vector<std::pair<int, double>> match_vector(const FlowPlan& plan, int k,
                                                 std::span<const int> q) {
  std::vector<std::pair<int, double>> out;
  double covered = 0.0;
  for (const auto& [m, f] : plan.partners[k]) {
    if (q[m] > 0) {
      out.emplace_back(m, f);
      covered += f;
    }
  }
  if (out.empty()) throw Error(ErrorCode::EmptyOppositeSide, "no non-empty partner queue");
  const double a = plan.alpha[k];
  const double spread = (a - covered) / static_cast<double>(out.size());
  for (auto& [m, p] : out) p = (p + spread) / a;
  return out;
}

MatchProbabilities matching_vectors(const FlowPlan& plan, std::span<const int> q) {
  MatchProbabilities mp;
  mp.probs.resize(plan.partners.size());
  for (std::size_t k = 0; k < plan.partners.size(); ++k) {
    if (plan.alpha[k] <= 0.0) continue;
    const bool any = std::any_of(plan.partners[k].begin(), plan.partners[k].end(),
                                 [&](const auto& pf) { return q[pf.first] > 0; });
    if (any) mp.probs[k] = match_vector(plan, static_cast<int>(k), q);
  }
  return mp;
}

namespace {

int sample_partner(const std::vector<std::pair<int, double>>& v, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [m, p] : v) {
    acc += p;
    if (u < acc) return m;
  }
  return v.back().first;
}

}  // namespace

MatchingDecision randomized_flow_decide(const MatchingGraph& g, const FlowPlan& plan,
                                        std::span<const int> x, Edge arrival, Rng& rng) {
  MatchingDecision u{std::vector<int>(g.edges.size(), 0)};
  std::vector<int> q(x.begin(), x.end());
  const int ai = arrival.demand;
  const int aj = g.supply_node(arrival.supply);
  --q[ai];
  --q[aj];
  for (int k : {ai, aj}) {
    std::vector<std::pair<int, double>> v;
    try {
      v = match_vector(plan, k, q);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyOppositeSide) throw;
      continue;
    }
    const int m = sample_partner(v, rng);
    --q[m];
    if (k < g.n_demand) {
      add_match(g, u, k, m - g.n_demand);
    } else {
      add_match(g, u, m, k - g.n_demand);
    }
  }
  return u;
}

namespace {

class HmwtPolicy final : public Policy {
 public:
  HmwtPolicy(const MatchingGraph& g, HParams h, double tau) : g_(g), h_(std::move(h)), tau_(tau) {}
  MatchingDecision decide(std::span<const int> x, Edge, Rng&) override {
    return hmwt_decide(g_, h_, tau_, x);
  }

 private:
  MatchingGraph g_;
  HParams h_;
  double tau_;
};

class HMaxWeightPolicy final : public Policy {
 public:
  HMaxWeightPolicy(const MatchingGraph& g, std::vector<double> w) : g_(g), w_(std::move(w)) {}
  MatchingDecision decide(std::span<const int> x, Edge, Rng&) override {
    return h_maxweight_decide(g_, w_, x);
  }

 private:
  MatchingGraph g_;
  std::vector<double> w_;
};

class GreedyPolicy final : public Policy {
 public:
  GreedyPolicy(const MatchingGraph& g, CostVector c) : g_(g), c_(std::move(c)) {}
  MatchingDecision decide(std::span<const int> x, Edge a, Rng&) override {
    return greedy_maxweight_decide(g_, c_, x, a);
  }

 private:
  MatchingGraph g_;
  CostVector c_;
};

class PriorityPolicy final : public Policy {
 public:
  PriorityPolicy(const MatchingGraph& g, std::vector<Edge> order) : g_(g), order_(std::move(order)) {}
  MatchingDecision decide(std::span<const int> x, Edge a, Rng&) override {
    return priority_decide(g_, order_, x, a);
  }

 private:
  MatchingGraph g_;
  std::vector<Edge> order_;
};

class RandomizedPolicy final : public Policy {
 public:
  RandomizedPolicy(const MatchingGraph& g, FlowPlan plan) : g_(g), plan_(std::move(plan)) {}
  MatchingDecision decide(std::span<const int> x, Edge a, Rng& rng) override {
    return randomized_flow_decide(g_, plan_, x, a, rng);
  }

 private:
  MatchingGraph g_;
  FlowPlan plan_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const MatchingGraph& g, const PolicyConfig& cfg,
                                    std::span<const double> alpha) {
  switch (cfg.kind) {
    case PolicyKind::HMWT:
      if (cfg.h.xi.xi.size() != static_cast<std::size_t>(g.dim()) ||
          cfg.h.c.c.size() != static_cast<std::size_t>(g.dim())) {
        throw Error(ErrorCode::InvalidParameter, "h-MWT needs a workload vector and cost");
      }
      return std::make_unique<HmwtPolicy>(
          g, cfg.shift_h_to_tau ? with_threshold(cfg.h, cfg.tau) : cfg.h, cfg.tau);
    case PolicyKind::HMaxWeight: {
      std::vector<double> w(g.dim(), 1.0);
      if (cfg.weights == QuadraticWeights::Cost) {
        validate_cost(g, cfg.cost);
        w = cfg.cost.c;
      }
      return std::make_unique<HMaxWeightPolicy>(g, std::move(w));
    }
    case PolicyKind::GreedyMaxWeight:
      validate_cost(g, cfg.cost);
      return std::make_unique<GreedyPolicy>(g, cfg.cost);
    case PolicyKind::Priority: {
      auto sorted = cfg.priority_order;
      std::sort(sorted.begin(), sorted.end());
      auto edges = g.edges;
      std::sort(edges.begin(), edges.end());
      if (sorted != edges) {
        throw Error(ErrorCode::InvalidParameter, "priority order must list every edge exactly once");
      }
      return std::make_unique<PriorityPolicy>(g, cfg.priority_order);
    }
    case PolicyKind::RandomizedFlow:
      return std::make_unique<RandomizedPolicy>(
          g, make_flow_plan(g, alpha, cfg.d, cfg.split_components));
  }
  throw Error(ErrorCode::InvalidParameter, "unknown policy kind");
}

}  // namespace bmatch

#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "bmatch/error.hpp"

namespace bmatch::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad("missing or malformed '" + key + "' in " + where);
  }
}

Edge edge_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    bad(where + ": a pair is written [demand, supply] with 1-based indices");
  }
  if (j[0].get<int>() < 1 || j[1].get<int>() < 1) bad(where + ": indices start at 1");
  return {j[0].get<int>() - 1, j[1].get<int>() - 1};
}

json edge_to(Edge e) { return json::array({e.demand + 1, e.supply + 1}); }

PairMasses masses_from(const json& j, const std::string& where, int nd, int ns) {
  PairMasses out;
  if (j.is_object()) {
    only_keys(j, where, {"demand", "supply"});
    const auto pd = get<std::vector<double>>(j, "demand", where);
    const auto ps = get<std::vector<double>>(j, "supply", where);
    if (static_cast<int>(pd.size()) != nd || static_cast<int>(ps.size()) != ns) {
      bad(where + ": product law lengths must match the class counts");
    }
    for (int i = 0; i < nd; ++i) {
      for (int k = 0; k < ns; ++k) out.push_back({{i, k}, pd[i] * ps[k]});
    }
    return out;
  }
  if (!j.is_array()) bad(where + " must be a list of {pair, prob} or a product law");
  for (const auto& item : j) {
    only_keys(item, where, {"pair", "prob"});
    out.push_back({edge_from(item.at("pair"), where), get<double>(item, "prob", where)});
  }
  return out;
}

json masses_to(const PairMasses& m) {
  json a = json::array();
  for (const auto& [e, p] : m) a.push_back({{"pair", edge_to(e)}, {"prob", p}});
  return a;
}

}  // namespace

bool PolicySection::operator==(const PolicySection& o) const {
  return kind == o.kind && tau == o.tau && tuning.theta == o.tuning.theta &&
         tuning.delta_plus == o.tuning.delta_plus && tuning.beta == o.tuning.beta &&
         tuning.kappa == o.tuning.kappa && weights == o.weights &&
         priority_order == o.priority_order && split_components == o.split_components &&
         shift_h == o.shift_h;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return graph.n_demand == o.graph.n_demand && graph.n_supply == o.graph.n_supply &&
         graph.edges == o.graph.edges && graph.arrival_pairs == o.graph.arrival_pairs &&
         graph.max_matches == o.graph.max_matches && arrival_pairs_all == o.arrival_pairs_all &&
         arrivals == o.arrivals && family == o.family && cost == o.cost &&
         workload == o.workload && policy == o.policy && sim == o.sim &&
         experiment == o.experiment && oracle == o.oracle;
}

ExperimentConfig parse_config(const json& j) {
  only_keys(j, "config", {"graph", "arrivals", "cost", "workload", "policy", "sim", "experiment", "oracle"});
  ExperimentConfig c;

  if (!j.contains("graph")) bad("missing 'graph'");
  const json& g = j.at("graph");
  only_keys(g, "graph", {"demand", "supply", "edges", "arrival_pairs", "max_matches"});
  c.graph.n_demand = get<int>(g, "demand", "graph");
  c.graph.n_supply = get<int>(g, "supply", "graph");
  if (!g.contains("edges") || !g.at("edges").is_array()) bad("graph.edges must be a list");
  for (const auto& e : g.at("edges")) c.graph.edges.push_back(edge_from(e, "graph.edges"));
  if (g.contains("max_matches")) c.graph.max_matches = get<int>(g, "max_matches", "graph");
  if (!g.contains("arrival_pairs") || g.at("arrival_pairs") == "edges") {
    c.graph.arrival_pairs = c.graph.edges;
  } else if (g.at("arrival_pairs") == "all") {
    c.arrival_pairs_all = true;
    for (int i = 0; i < c.graph.n_demand; ++i) {
      for (int k = 0; k < c.graph.n_supply; ++k) c.graph.arrival_pairs.push_back({i, k});
    }
  } else if (g.at("arrival_pairs").is_array()) {
    for (const auto& e : g.at("arrival_pairs")) {
      c.graph.arrival_pairs.push_back(edge_from(e, "graph.arrival_pairs"));
    }
  } else {
    bad("graph.arrival_pairs must be \"edges\", \"all\" or a list");
  }

  if (!j.contains("arrivals")) bad("missing 'arrivals'");
  const json& a = j.at("arrivals");
  only_keys(a, "arrivals", {"pairs", "family"});
  const int nd = c.graph.n_demand;
  const int ns = c.graph.n_supply;
  if (a.contains("pairs") == a.contains("family")) bad("arrivals needs exactly one of pairs/family");
  if (a.contains("pairs")) {
    c.arrivals = masses_from(a.at("pairs"), "arrivals.pairs", nd, ns);
  } else {
    const json& f = a.at("family");
    only_keys(f, "arrivals.family", {"endpoint0", "endpoint1", "delta"});
    FamilySection fs;
    fs.endpoint0 = masses_from(f.at("endpoint0"), "arrivals.family.endpoint0", nd, ns);
    fs.endpoint1 = masses_from(f.at("endpoint1"), "arrivals.family.endpoint1", nd, ns);
    fs.delta = get<double>(f, "delta", "arrivals.family");
    c.family = fs;
  }

  if (!j.contains("cost")) bad("missing 'cost'");
  c.cost = get<std::vector<double>>(j, "cost", "config");

  if (j.contains("workload")) {
    only_keys(j.at("workload"), "workload", {"D"});
    DemandSet d;
    for (int i : get<std::vector<int>>(j.at("workload"), "D", "workload")) d.push_back(i - 1);
    std::sort(d.begin(), d.end());
    c.workload = d;
  }

  if (j.contains("policy")) {
    const json& p = j.at("policy");
    only_keys(p, "policy", {"kind", "tau", "theta", "delta_plus", "beta", "kappa", "weights",
                            "priority_order", "split_components", "shift_h"});
    if (p.contains("kind")) c.policy.kind = get<std::string>(p, "kind", "policy");
    parse_policy_kind(c.policy.kind);
    if (p.contains("tau")) {
      if (p.at("tau").is_string()) {
        if (p.at("tau") != "auto") bad("policy.tau must be a number or \"auto\"");
      } else {
        c.policy.tau = get<double>(p, "tau", "policy");
      }
    }
    if (p.contains("theta")) c.policy.tuning.theta = get<double>(p, "theta", "policy");
    if (p.contains("delta_plus")) c.policy.tuning.delta_plus = get<double>(p, "delta_plus", "policy");
    if (p.contains("beta")) c.policy.tuning.beta = get<double>(p, "beta", "policy");
    if (p.contains("kappa")) c.policy.tuning.kappa = get<double>(p, "kappa", "policy");
    if (p.contains("weights")) c.policy.weights = get<std::string>(p, "weights", "policy");
    if (c.policy.weights != "unit" && c.policy.weights != "cost") {
      bad("policy.weights must be \"unit\" or \"cost\"");
    }
    if (p.contains("priority_order")) {
      for (const auto& e : p.at("priority_order")) {
        c.policy.priority_order.push_back(edge_from(e, "policy.priority_order"));
      }
    }
    if (p.contains("shift_h")) c.policy.shift_h = get<bool>(p, "shift_h", "policy");
    if (p.contains("split_components")) {
      c.policy.split_components = get<bool>(p, "split_components", "policy");
    }
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    only_keys(s, "sim", {"horizon", "burn_in", "seed", "cost_basis", "initial_state"});
    if (s.contains("horizon")) c.sim.horizon = get<std::uint64_t>(s, "horizon", "sim");
    if (s.contains("burn_in")) c.sim.burn_in = get<std::uint64_t>(s, "burn_in", "sim");
    if (s.contains("seed")) c.sim.seed = get<std::uint64_t>(s, "seed", "sim");
    if (s.contains("cost_basis")) c.sim.cost_basis = get<std::string>(s, "cost_basis", "sim");
    if (c.sim.cost_basis != "Q" && c.sim.cost_basis != "X") bad("sim.cost_basis must be Q or X");
    if (s.contains("initial_state")) c.sim.initial_state = get<std::vector<int>>(s, "initial_state", "sim");
  }

  if (j.contains("experiment")) {
    const json& e = j.at("experiment");
    only_keys(e, "experiment", {"kind", "grid", "policies", "common_random_numbers"});
    if (e.contains("kind")) c.experiment.kind = get<std::string>(e, "kind", "experiment");
    if (!c.experiment.kind.empty() && c.experiment.kind != "threshold_sweep" &&
        c.experiment.kind != "policy_compare") {
      bad("experiment.kind must be threshold_sweep or policy_compare");
    }
    if (e.contains("grid")) c.experiment.grid = get<std::vector<double>>(e, "grid", "experiment");
    if (e.contains("policies")) {
      c.experiment.policies = get<std::vector<std::string>>(e, "policies", "experiment");
      for (const auto& k : c.experiment.policies) parse_policy_kind(k);
    }
    if (e.contains("common_random_numbers")) {
      c.experiment.common_random_numbers = get<bool>(e, "common_random_numbers", "experiment");
    }
  }

  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    only_keys(o, "oracle", {"cap", "tol", "w_max"});
    if (o.contains("cap")) c.oracle.cap = get<int>(o, "cap", "oracle");
    if (o.contains("tol")) c.oracle.tol = get<double>(o, "tol", "oracle");
    if (o.contains("w_max")) c.oracle.w_max = get<int>(o, "w_max", "oracle");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    bad(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  json g;
  g["demand"] = c.graph.n_demand;
  g["supply"] = c.graph.n_supply;
  g["edges"] = json::array();
  for (const auto& e : c.graph.edges) g["edges"].push_back(edge_to(e));
  if (c.arrival_pairs_all) {
    g["arrival_pairs"] = "all";
  } else {
    g["arrival_pairs"] = json::array();
    for (const auto& e : c.graph.arrival_pairs) g["arrival_pairs"].push_back(edge_to(e));
  }
  g["max_matches"] = c.graph.max_matches;
  j["graph"] = g;
  if (c.family) {
    j["arrivals"]["family"] = {{"endpoint0", masses_to(c.family->endpoint0)},
                               {"endpoint1", masses_to(c.family->endpoint1)},
                               {"delta", c.family->delta}};
  } else {
    j["arrivals"]["pairs"] = masses_to(c.arrivals);
  }
  j["cost"] = c.cost;
  if (c.workload) {
    std::vector<int> d;
    for (int i : *c.workload) d.push_back(i + 1);
    j["workload"]["D"] = d;
  }
  json p;
  p["kind"] = c.policy.kind;
  if (c.policy.tau) {
    p["tau"] = *c.policy.tau;
  } else {
    p["tau"] = "auto";
  }
  p["theta"] = c.policy.tuning.theta;
  p["delta_plus"] = c.policy.tuning.delta_plus;
  p["beta"] = c.policy.tuning.beta;
  p["kappa"] = c.policy.tuning.kappa;
  p["weights"] = c.policy.weights;
  p["priority_order"] = json::array();
  for (const auto& e : c.policy.priority_order) p["priority_order"].push_back(edge_to(e));
  p["split_components"] = c.policy.split_components;
  p["shift_h"] = c.policy.shift_h;
  j["policy"] = p;
  json s;
  s["horizon"] = c.sim.horizon;
  if (c.sim.burn_in) s["burn_in"] = *c.sim.burn_in;
  s["seed"] = c.sim.seed;
  s["cost_basis"] = c.sim.cost_basis;
  s["initial_state"] = c.sim.initial_state;
  j["sim"] = s;
  j["experiment"] = {{"kind", c.experiment.kind},
                     {"grid", c.experiment.grid},
                     {"policies", c.experiment.policies},
                     {"common_random_numbers", c.experiment.common_random_numbers}};
  j["oracle"] = {{"cap", c.oracle.cap}, {"tol", c.oracle.tol}, {"w_max", c.oracle.w_max}};
  return j;
}

Resolved resolve(const ExperimentConfig& cfg) {
  Resolved r;
  r.graph = cfg.graph;
  validate_graph(r.graph);
  r.cost = CostVector{cfg.cost};
  validate_cost(r.graph, r.cost);
  if (cfg.workload) r.xi = workload_vector(r.graph, *cfg.workload);
  if (cfg.family) {
    if (!r.xi) bad("an arrival family needs workload.D to define its drift");
    ArrivalFamily fam{build_distribution(r.graph, cfg.family->endpoint0),
                      build_distribution(r.graph, cfg.family->endpoint1)};
    r.dist = fam.at(r.graph, *r.xi, cfg.family->delta);
  } else {
    r.dist = build_distribution(r.graph, cfg.arrivals);
  }
  if (r.xi) {
    r.moments = moments(r.graph, r.dist, *r.xi);
    r.slopes = slopes(r.graph, r.cost, *r.xi);
    if (r.moments->delta > 0.0 && r.moments->sigma2_delta > 0.0) {
      r.h = build_params(r.moments->delta, r.moments->sigma2_delta, *r.slopes, cfg.policy.tuning,
                         *r.xi, r.cost);
      r.tau = cfg.policy.tau.value_or(r.h->tau_star);
    }
  }
  if (cfg.policy.tau) r.tau = *cfg.policy.tau;
  return r;
}

PolicyConfig policy_for(const ExperimentConfig& cfg, const Resolved& r, const std::string& kind) {
  PolicyConfig p;
  p.kind = parse_policy_kind(kind);
  p.tau = r.tau;
  p.cost = r.cost;
  p.weights = cfg.policy.weights == "cost" ? QuadraticWeights::Cost : QuadraticWeights::Unit;
  p.priority_order = cfg.policy.priority_order.empty() ? cfg.graph.edges : cfg.policy.priority_order;
  p.split_components = cfg.policy.split_components;
  p.shift_h_to_tau = cfg.policy.shift_h;
  if (cfg.workload) p.d = *cfg.workload;
  if (p.kind == PolicyKind::HMWT) {
    if (!r.h) bad("h-MWT needs workload.D with positive drift and variance");
    p.h = *r.h;
  }
  if (p.kind == PolicyKind::RandomizedFlow && p.split_components && p.d.empty()) {
    bad("randomized policy with split_components needs workload.D");
  }
  return p;
}

SimConfig sim_config(const ExperimentConfig& cfg, const Resolved& r) {
  SimConfig s;
  s.graph = r.graph;
  s.arrivals = r.dist;
  s.cost = r.cost;
  s.policy = policy_for(cfg, r, cfg.policy.kind);
  s.horizon = cfg.sim.horizon;
  s.burn_in = cfg.sim.burn_in;
  s.seed = cfg.sim.seed;
  s.initial_state = cfg.sim.initial_state;
  s.cost_basis = cfg.sim.cost_basis == "X" ? CostBasis::X : CostBasis::Q;
  if (r.xi) s.xi = *r.xi;
  return s;
}

}  // namespace bmatch::cli

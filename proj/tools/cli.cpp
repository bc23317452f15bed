#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bmatch/error.hpp"
#include "bmatch/oracle.hpp"
#include "bmatch/random.hpp"
#include "bmatch/relaxation.hpp"
#include "config.hpp"

namespace bmatch::cli {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string node_name(const MatchingGraph& g, int k) {
  return k < g.n_demand ? "d" + std::to_string(k + 1) : "s" + std::to_string(k - g.n_demand + 1);
}

std::string set_name(const std::vector<int>& idx, const char* prefix) {
  std::string s = "{";
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) s += ";";
    s += prefix + std::to_string(idx[k] + 1);
  }
  return s + "}";
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidParameter, "--steps must be >= 1");
  std::vector<double> g;
  if (steps == 1) return {lo};
  for (int k = 0; k < steps; ++k) g.push_back(lo + (hi - lo) * k / (steps - 1));
  return g;
}

const char* kSimHeader = "label,tau,avg_cost,stderr,idleness_rate,mean_workload,max_buffer,T,seed\n";

void sim_row(std::ostream& os, const std::string& label, std::optional<double> tau,
             const SimResult& r) {
  os << label << ',' << (tau ? num(*tau) : "") << ',' << num(r.avg_cost) << ',' << num(r.stderr)
     << ',' << num(r.idleness_rate) << ',' << num(r.mean_workload) << ',' << r.max_buffer << ','
     << r.steps << ',' << r.seed << '\n';
}

struct Common {
  std::string config;
  std::string out_path;
};

int cmd_validate(const ExperimentConfig& cfg, std::ostream& os) {
  const Resolved r = resolve(cfg);
  const auto alpha = r.dist.alpha();
  const auto nc = check_ncond(r.graph, alpha);
  os << "check,value\n";
  os << "graph,ok\n";
  os << "n_demand," << r.graph.n_demand << "\n";
  os << "n_supply," << r.graph.n_supply << "\n";
  os << "n_edges," << r.graph.edges.size() << "\n";
  os << "ncond," << (nc.satisfied ? "satisfied" : "violated") << "\n";
  os << "ncond_margin," << num(nc.margin) << "\n";
  if (nc.witness) os << "ncond_witness," << set_name(*nc.witness, "d") << "\n";
  if (r.xi) {
    const auto rep = check_assumptions(r.graph, r.dist, *r.xi, 0.0, 0.0);
    os << "designated_D," << set_name(r.xi->demand_set, "d") << "\n";
    os << "designated_margin," << num(rep.designated_drift) << "\n";
    os << "other_max_margin," << num(rep.other_max_drift) << "\n";
    os << "a1," << (rep.a1_ok ? "ok" : "warn") << "\n";
    if (rep.a3_pair) {
      os << "a3_pair,(d" << rep.a3_pair->demand + 1 << ";s" << rep.a3_pair->supply + 1 << ")\n";
    }
    os << "a3_mass," << num(rep.a3_mass) << "\n";
    os << "split_connected," << (rep.split_connected ? "yes" : "no") << "\n";
    for (const auto& w : rep.warnings) os << "warning," << w << "\n";
  }
  if (!nc.satisfied) throw Error(ErrorCode::NCondViolated, "arrival rates violate NCond");
  return 0;
}

int cmd_moments(const ExperimentConfig& cfg, std::ostream& os) {
  const Resolved r = resolve(cfg);
  if (!r.xi) throw Error(ErrorCode::InvalidConfig, "moments needs workload.D");
  const auto& m = *r.moments;
  const auto& s = *r.slopes;
  os << "quantity,value\n";
  for (int k = 0; k < r.graph.dim(); ++k) {
    os << "alpha_" << node_name(r.graph, k) << ',' << num(m.alpha[k]) << "\n";
  }
  os << "delta," << num(m.delta) << "\n";
  os << "sigma2," << num(m.sigma2_delta) << "\n";
  os << "c_plus," << num(s.c_plus) << "\n";
  os << "c_minus," << num(s.c_minus) << "\n";
  if (m.delta > 0.0) {
    const auto t = tau_star(m.delta, m.sigma2_delta, s.c_plus, s.c_minus);
    os << "tau_star," << num(t.tau) << "\n";
    os << "eta_ss," << num(t.eta_ss) << "\n";
  }
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& os) {
  const Resolved r = resolve(cfg);
  const SimConfig sc = sim_config(cfg, r);
  const auto res = run(sc);
  os << kSimHeader;
  const bool thr = sc.policy.kind == PolicyKind::HMWT;
  sim_row(os, cfg.policy.kind, thr ? std::optional<double>(sc.policy.tau) : std::nullopt, res);
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& os, std::ostream& err,
              std::optional<double> tau_min, std::optional<double> tau_max, int steps, bool crn,
              unsigned threads) {
  const Resolved r = resolve(cfg);
  SimConfig sc = sim_config(cfg, r);
  if (sc.policy.kind != PolicyKind::HMWT) sc.policy = policy_for(cfg, r, "hmwt");
  std::vector<double> grid = cfg.experiment.grid;
  if (tau_min || tau_max || grid.empty()) {
    const double ts = sc.policy.h.tau_star;
    grid = linear_grid(tau_min.value_or(0.5 * ts), tau_max.value_or(1.5 * ts), steps);
  }
  const auto s = threshold_sweep(sc, grid, {threads, crn || cfg.experiment.common_random_numbers});
  os << kSimHeader;
  for (const auto& row : s.rows) sim_row(os, row.label, row.tau, row.result);
  err << "argmin_tau=" << num(s.tau_best) << " tau_star=" << num(s.tau_star) << "\n";
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& os, std::vector<std::string> kinds,
                bool crn, unsigned threads) {
  const Resolved r = resolve(cfg);
  const SimConfig sc = sim_config(cfg, r);
  if (kinds.empty()) kinds = cfg.experiment.policies;
  if (kinds.empty()) kinds = {"hmwt", "greedy", "priority"};
  std::vector<Variation> vars;
  for (const auto& k : kinds) {
    auto p = policy_for(cfg, r, k);
    std::optional<double> tau;
    if (p.kind == PolicyKind::HMWT) tau = p.tau;
    vars.push_back({k, p, tau});
  }
  const auto rows =
      run_experiment(sc, vars, {threads, crn || cfg.experiment.common_random_numbers});
  os << kSimHeader;
  for (const auto& row : rows) sim_row(os, row.label, row.tau, row.result);
  return 0;
}

int cmd_relaxation(const ExperimentConfig& cfg, std::ostream& os, bool use_sim,
                   std::optional<double> tau_min, std::optional<double> tau_max, int steps,
                   unsigned threads) {
  const Resolved r = resolve(cfg);
  if (!r.xi) throw Error(ErrorCode::InvalidConfig, "relaxation needs workload.D");
  const auto model = make_relaxation(*r.moments, *r.slopes, r.graph.max_matches);
  const auto ts = tau_star(model);
  if (!use_sim) {
    const auto sol = relaxation_value_iteration(model, cfg.oracle.w_max, {cfg.oracle.tol});
    os << "quantity,value\n";
    os << "eta_hat_star," << num(sol.eta_hat_star) << "\n";
    os << "threshold_estimate," << num(sol.threshold_estimate) << "\n";
    os << "tau_star," << num(ts.tau) << "\n";
    os << "eta_ss," << num(ts.eta_ss) << "\n";
    os << "iterations," << sol.iterations << "\n";
    return 0;
  }
  std::vector<double> grid = cfg.experiment.grid;
  if (tau_min || tau_max || grid.empty()) {
    grid = linear_grid(tau_min.value_or(0.5 * ts.tau), tau_max.value_or(1.5 * ts.tau), steps);
  }
  std::vector<RelaxationRun> runs(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      runs[k] = simulate_relaxation(model, grid[k], cfg.sim.horizon, derive_seed(cfg.sim.seed, k));
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::min<std::size_t>(threads, grid.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  os << "tau,avg_cost,stderr\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << num(grid[k]) << ',' << num(runs[k].avg_cost) << ',' << num(runs[k].stderr) << "\n";
  }
  return 0;
}

int cmd_oracle(const ExperimentConfig& cfg, std::ostream& os, std::optional<int> cap,
               bool table) {
  const Resolved r = resolve(cfg);
  TruncatedMDP m{r.graph, r.dist, r.cost, cap.value_or(cfg.oracle.cap),
                 cfg.sim.cost_basis == "X" ? CostBasis::X : CostBasis::Q};
  const auto sol = mdp_value_iteration(m, {cfg.oracle.tol});
  if (!table) {
    os << "quantity,value\n";
    os << "eta_star," << num(sol.eta_star) << "\n";
    os << "cap," << m.buffer_cap << "\n";
    os << "states," << sol.states.size() << "\n";
    os << "iterations," << sol.iterations << "\n";
    os << "span," << num(sol.span) << "\n";
    return 0;
  }
  for (int k = 0; k < r.graph.dim(); ++k) os << node_name(r.graph, k) << ',';
  os << "h_star";
  for (const auto& e : r.graph.edges) os << ",n_d" << e.demand + 1 << "s" << e.supply + 1;
  os << "\n";
  for (std::size_t s = 0; s < sol.states.size(); ++s) {
    for (int v : sol.states[s]) os << v << ',';
    os << num(sol.h_star[s]);
    for (int n : sol.policy[s].counts) os << ',' << n;
    os << "\n";
  }
  return 0;
}

int cmd_dump_h(const ExperimentConfig& cfg, std::ostream& os, std::optional<double> w_min,
               std::optional<double> w_max, int points) {
  const Resolved r = resolve(cfg);
  if (!r.h) throw Error(ErrorCode::InvalidConfig, "dump-h needs workload.D with positive drift");
  const auto& h = *r.h;
  const auto grid = linear_grid(w_min.value_or(-2.0 * h.tau_star - 5.0),
                                w_max.value_or(2.0 * h.tau_star + 5.0), points);
  os << "w,h,dh,d2h\n";
  for (double w : grid) {
    os << num(w) << ',' << num(hhat_eval(h, w, 0)) << ',' << num(hhat_eval(h, w, 1)) << ','
       << num(hhat_eval(h, w, 2)) << "\n";
  }
  return 0;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoConvergence:
    case ErrorCode::StateSpaceTooLarge:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bipartite matching network control: analysis, simulation and oracles", "bmatch"};
  app.require_subcommand(1);
  Common common;
  std::optional<double> tau_min, tau_max, w_min, w_max;
  int steps = 11;
  int points = 201;
  bool crn = false;
  bool vi = false;
  bool sim = false;
  bool table = false;
  std::optional<int> cap;
  std::vector<std::string> policies;
  unsigned threads = default_threads();

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("config", common.config, "Experiment config (JSON)")->required();
    sc->add_option("--out", common.out_path, "Write CSV to this file instead of stdout");
  };
  auto* validate = app.add_subcommand("validate", "Graph, NCond and heavy-traffic assumption report");
  auto* mom = app.add_subcommand("moments", "Arrival rates, drift, variance, slopes and tau*");
  auto* simulate = app.add_subcommand("simulate", "Simulate the configured policy");
  auto* sweep = app.add_subcommand("sweep", "h-MWT threshold sweep");
  auto* compare = app.add_subcommand("compare", "Compare policies on common settings");
  auto* relax = app.add_subcommand("relaxation", "Workload relaxation: value iteration or simulation");
  auto* oracle = app.add_subcommand("oracle", "Truncated MDP relative value iteration");
  auto* dump = app.add_subcommand("dump-h", "Tabulate the value function and its derivatives");
  for (auto* sc : {validate, mom, simulate, sweep, compare, relax, oracle, dump}) add_common(sc);
  for (auto* sc : {sweep, relax}) {
    sc->add_option("--tau-min", tau_min, "Smallest threshold");
    sc->add_option("--tau-max", tau_max, "Largest threshold");
    sc->add_option("--steps", steps, "Number of grid points")->check(CLI::PositiveNumber);
  }
  for (auto* sc : {sweep, compare, relax}) {
    sc->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  }
  for (auto* sc : {sweep, compare}) {
    sc->add_flag("--crn", crn, "Use the same seed for every variation");
  }
  compare->add_option("--policies", policies, "Policy kinds: hmwt hmaxweight greedy priority randomized")
      ->delimiter(',');
  auto* vi_flag = relax->add_flag("--vi", vi, "Lattice value iteration (default)");
  relax->add_flag("--sim", sim, "Simulate threshold policies over a grid")->excludes(vi_flag);
  oracle->add_option("--cap", cap, "Buffer cap per class")->check(CLI::PositiveNumber);
  oracle->add_flag("--policy-table", table, "Dump h* and the optimal decision per state");
  dump->add_option("--w-min", w_min, "Smallest workload");
  dump->add_option("--w-max", w_max, "Largest workload");
  dump->add_option("--points", points, "Number of points")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store{"bmatch"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help on a subcommand
      for (auto* sc : app.get_subcommands()) out << sc->help();
      if (app.get_subcommands().empty()) out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  std::ostringstream buf;
  try {
    const ExperimentConfig cfg = load_config(common.config);
    if (validate->parsed()) cmd_validate(cfg, buf);
    if (mom->parsed()) cmd_moments(cfg, buf);
    if (simulate->parsed()) cmd_simulate(cfg, buf);
    if (sweep->parsed()) cmd_sweep(cfg, buf, err, tau_min, tau_max, steps, crn, threads);
    if (compare->parsed()) cmd_compare(cfg, buf, policies, crn, threads);
    if (relax->parsed()) cmd_relaxation(cfg, buf, sim, tau_min, tau_max, steps, threads);
    if (oracle->parsed()) cmd_oracle(cfg, buf, cap, table);
    if (dump->parsed()) cmd_dump_h(cfg, buf, w_min, w_max, points);
  } catch (const Error& e) {
    out << buf.str();
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (common.out_path.empty()) {
    out << buf.str();
  } else {
    std::ofstream f(common.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << common.out_path << "'\n";
      return 2;
    }
    f << buf.str();
  }
  return 0;
}

}  // namespace bmatch::cli

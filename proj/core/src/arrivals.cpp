#include "bmatch/arrivals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "bmatch/error.hpp"

namespace bmatch {

double ArrivalDistribution::prob(Edge e) const {
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    if (pairs_[k] == e) return probs_[k];
  }
  return 0.0;
}

std::vector<double> ArrivalDistribution::alpha() const {
  std::vector<double> a(n_demand_ + n_supply_, 0.0);
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    a[pairs_[k].demand] += probs_[k];
    a[n_demand_ + pairs_[k].supply] += probs_[k];
  }
  return a;
}

Edge ArrivalDistribution::sample(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
  if (k >= pairs_.size()) k = pairs_.size() - 1;
  return pairs_[k];
}

ArrivalDistribution build_distribution(const MatchingGraph& g,
                                       const std::vector<std::pair<Edge, double>>& probs) {
  std::map<Edge, double> merged;
  double total = 0.0;
  for (const auto& [e, p] : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::NotNormalized, "arrival masses must be finite and non-negative");
    }
    if (p > 0.0 && !g.is_arrival_pair(e)) {
      std::ostringstream os;
      os << "mass on (d" << e.demand + 1 << ",s" << e.supply + 1 << ") which is not an arrival pair";
      throw Error(ErrorCode::UnsupportedPair, os.str());
    }
    if (p > 0.0) merged[e] += p;
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "masses sum to " << total;
    throw Error(ErrorCode::NotNormalized, os.str());
  }
  ArrivalDistribution d;
  d.n_demand_ = g.n_demand;
  d.n_supply_ = g.n_supply;
  double acc = 0.0;
  for (const auto& [e, p] : merged) {
    d.pairs_.push_back(e);
    d.probs_.push_back(p);
    acc += p;
    d.cumulative_.push_back(acc);
  }
  if (d.pairs_.empty()) throw Error(ErrorCode::NotNormalized, "empty arrival distribution");
  d.cumulative_.back() = 1.0;
  return d;
}

ArrivalMoments moments(const MatchingGraph& g, const ArrivalDistribution& dist,
                       const WorkloadVector& xi) {
  ArrivalMoments m;
  m.alpha = dist.alpha();
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k < dist.pairs().size(); ++k) {
    const Edge e = dist.pairs()[k];
    const double p = dist.probs()[k];
    const int inc = xi.xi[e.demand] + xi.xi[g.supply_node(e.supply)];
    if (inc < -1 || inc > 1) {
      throw Error(ErrorCode::InvalidParameter, "workload increment outside {-1,0,1}");
    }
    m.increment_probs[inc + 1] += p;
    mean += p * inc;
    second += p * inc * inc;
  }
  m.delta = -mean;
  m.sigma2_delta = std::max(0.0, second - mean * mean);
  return m;
}

namespace {

double drift_of(const MatchingGraph& g, const ArrivalDistribution& d, const WorkloadVector& xi) {
  return moments(g, d, xi).delta;
}

}  // namespace

ArrivalDistribution ArrivalFamily::at(const MatchingGraph& g, const WorkloadVector& xi,
                                      double delta) const {
  const double d0 = drift_of(g, endpoint0, xi);
  const double d1 = drift_of(g, endpoint1, xi);
  if (std::abs(d1 - d0) < 1e-15) {
    throw Error(ErrorCode::InvalidParameter, "family endpoints have equal drift");
  }
  const double t = (delta - d0) / (d1 - d0);
  if (t < -1e-12 || t > 1.0 + 1e-12) {
    throw Error(ErrorCode::InvalidParameter, "requested drift outside the family's range");
  }
  const double tc = std::clamp(t, 0.0, 1.0);
  std::map<Edge, double> mix;
  for (std::size_t k = 0; k < endpoint0.pairs().size(); ++k) {
    mix[endpoint0.pairs()[k]] += (1.0 - tc) * endpoint0.probs()[k];
  }
  for (std::size_t k = 0; k < endpoint1.pairs().size(); ++k) {
    mix[endpoint1.pairs()[k]] += tc * endpoint1.probs()[k];
  }
  std::vector<std::pair<Edge, double>> list(mix.begin(), mix.end());
  double total = 0.0;
  for (auto& kv : list) total += kv.second;
  for (auto& kv : list) kv.second /= total;
  return build_distribution(g, list);
}

double ArrivalFamily::linear_rate_constant(const MatchingGraph& g, const WorkloadVector& xi) const {
  const double d0 = drift_of(g, endpoint0, xi);
  const double d1 = drift_of(g, endpoint1, xi);
  // Mixture coupling: A^δ differs from A^{δ₀} only when the t-coin picks
  // endpoint 1 and the maximal coupling of the endpoints disagrees; two
  // distinct arrival vectors are at Euclidean distance at most 2.
  std::map<Edge, std::pair<double, double>> both;
  for (std::size_t k = 0; k < endpoint0.pairs().size(); ++k) {
    both[endpoint0.pairs()[k]].first = endpoint0.probs()[k];
  }
  for (std::size_t k = 0; k < endpoint1.pairs().size(); ++k) {
    both[endpoint1.pairs()[k]].second = endpoint1.probs()[k];
  }
  double tv = 0.0;
  for (const auto& [e, pq] : both) tv += std::abs(pq.first - pq.second);
  tv *= 0.5;
  return 2.0 * tv / std::abs(d1 - d0);
}

AssumptionReport check_assumptions(const MatchingGraph& g, const ArrivalDistribution& dist,
                                   const WorkloadVector& xi, double delta_lower, double p_idle) {
  AssumptionReport r;
  const auto alpha = dist.alpha();
  r.designated_drift = xi.dot(std::span<const double>(alpha));
  r.other_max_drift = -std::numeric_limits<double>::infinity();
  std::uint32_t designated = 0;
  for (int i : xi.demand_set) designated |= 1u << i;
  for (std::uint32_t m = 1; m + 1 < (1u << g.n_demand); ++m) {
    if (m == designated) continue;
    DemandSet d;
    for (int i = 0; i < g.n_demand; ++i) {
      if (m & (1u << i)) d.push_back(i);
    }
    const auto w = workload_vector(g, d);
    r.other_max_drift = std::max(r.other_max_drift, w.dot(std::span<const double>(alpha)));
  }
  r.a1_ok = r.designated_drift < 0.0 && r.other_max_drift <= -delta_lower;
  if (r.designated_drift >= 0.0) {
    r.warnings.push_back("designated workload has non-negative drift xi.alpha");
  }
  if (r.other_max_drift > -delta_lower) {
    std::ostringstream os;
    os << "another subset has drift " << r.other_max_drift << " > -delta_lower";
    r.warnings.push_back(os.str());
  }

  // (A3): an arrival pair (j0 ∈ D^c, i0 ∈ Σ(D)).
  for (std::size_t k = 0; k < dist.pairs().size(); ++k) {
    const Edge e = dist.pairs()[k];
    const bool in_d = xi.xi[e.demand] == 1;
    const bool in_s = xi.xi[g.supply_node(e.supply)] == -1;
    if (!in_d && in_s && dist.probs()[k] > r.a3_mass) {
      r.a3_mass = dist.probs()[k];
      r.a3_pair = e;
    }
  }
  r.a3_ok = r.a3_mass >= p_idle && r.a3_mass > 0.0;
  if (!r.a3_ok) r.warnings.push_back("no cross arrival pair with mass >= p_I");

  DemandSet dc;
  for (int i = 0; i < g.n_demand; ++i) {
    if (xi.xi[i] != 1) dc.push_back(i);
  }
  std::vector<int> sc;
  for (int j = 0; j < g.n_supply; ++j) {
    if (xi.xi[g.supply_node(j)] != -1) sc.push_back(j);
  }
  r.split_connected = restricted_connected(g, xi.demand_set, xi.supply_set) &&
                      (sc.empty() ? false : restricted_connected(g, dc, sc));
  if (!r.split_connected) {
    r.warnings.push_back("graph without cross edges does not split into two connected parts");
  }
  return r;
}

}  // namespace bmatch

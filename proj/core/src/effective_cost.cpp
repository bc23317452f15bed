#include "bmatch/effective_cost.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "bmatch/error.hpp"

namespace bmatch {

double CostVector::operator()(std::span<const int> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * x[k];
  return s;
}

double CostVector::operator()(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * x[k];
  return s;
}

void validate_cost(const MatchingGraph& g, const CostVector& c) {
  if (static_cast<int>(c.c.size()) != g.dim()) {
    throw Error(ErrorCode::InvalidParameter, "cost vector length must equal the number of buffers");
  }
  for (double v : c.c) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidParameter, "cost entries must be positive");
    }
  }
}

namespace {

// Lowest-index minimizer of c over state positions where xi == want.
std::pair<double, int> min_where(const CostVector& c, const WorkloadVector& xi, int lo, int hi,
                                 int want) {
  double best = std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int k = lo; k < hi; ++k) {
    if (xi.xi[k] == want && c.c[k] < best) {
      best = c.c[k];
      arg = k;
    }
  }
  return {best, arg};
}

}  // namespace

EffectiveCostSlopes slopes(const MatchingGraph& g, const CostVector& c, const WorkloadVector& xi) {
  validate_cost(g, c);
  const int nd = g.n_demand;
  const int l = g.dim();
  EffectiveCostSlopes s;
  std::tie(s.c_plus_d, s.i_plus) = min_where(c, xi, 0, nd, 1);
  std::tie(s.c_plus_s, s.j_plus) = min_where(c, xi, nd, l, 0);
  std::tie(s.c_minus_d, s.i_minus) = min_where(c, xi, 0, nd, 0);
  std::tie(s.c_minus_s, s.j_minus) = min_where(c, xi, nd, l, -1);
  if (s.i_plus < 0 || s.j_minus < 0) {
    throw Error(ErrorCode::EmptyOrFullSubset, "workload set D must be non-empty");
  }
  if (s.j_plus < 0) {
    throw Error(ErrorCode::EmptyComplement, "S^c is empty: Σ(D) covers every supply class");
  }
  if (s.i_minus < 0) throw Error(ErrorCode::EmptyComplement, "D^c is empty");
  s.c_plus = s.c_plus_d + s.c_plus_s;
  s.c_minus = s.c_minus_d + s.c_minus_s;
  return s;
}

EffectiveState evaluate(const EffectiveCostSlopes& s, int dim, double w) {
  EffectiveState e;
  e.x_star.assign(dim, 0.0);
  e.cost = s.cost(w);
  if (w > 0.0) {
    e.x_star[s.i_plus] = w;
    e.x_star[s.j_plus] = w;
  } else if (w < 0.0) {
    e.x_star[s.i_minus] = -w;
    e.x_star[s.j_minus] = -w;
  }
  return e;
}

double brute_oracle(const MatchingGraph& g, const CostVector& c, const WorkloadVector& xi, int w) {
  const int l = g.dim();
  std::vector<int> bal(l);
  for (int k = 0; k < l; ++k) bal[k] = k < g.n_demand ? 1 : -1;
  if (w == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  // Single-index support: needs ξ_k·x = w and ξ⁰_k·x = 0, impossible for x > 0.
  for (int k = 0; k < l; ++k) {
    for (int m = k + 1; m < l; ++m) {
      // [ξ_k ξ_m; b_k b_m] [x_k; x_m] = [w; 0]
      const double a11 = xi.xi[k];
      const double a12 = xi.xi[m];
      const double a21 = bal[k];
      const double a22 = bal[m];
      const double det = a11 * a22 - a12 * a21;
      if (det == 0.0) continue;
      const double xk = (w * a22) / det;
      const double xm = (-w * a21) / det;
      if (xk < 0.0 || xm < 0.0) continue;
      best = std::min(best, c.c[k] * xk + c.c[m] * xm);
    }
  }
  return best;
}

}  // namespace bmatch

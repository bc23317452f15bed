#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bmatch/error.hpp"
#include "bmatch/value_function.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace bmatch;

namespace {

EffectiveCostSlopes sym(double cp, double cm) {
  EffectiveCostSlopes s;
  s.c_plus = cp;
  s.c_minus = cm;
  return s;
}

}  // namespace

TEST(ValueFunction, WorkedCoefficients) {
  const auto p = build_params(0.5, 1.0, sym(1, 1));
  const double ln2 = std::log(2.0);
  EXPECT_NEAR(p.Theta, 1.0, 1e-15);
  EXPECT_NEAR(p.A_plus, 1.0, 1e-15);
  EXPECT_NEAR(p.A_minus, -1.0, 1e-15);
  EXPECT_NEAR(p.eta_ss, ln2, 1e-15);
  EXPECT_NEAR(p.B_plus, 2 - 2 * ln2, 1e-14);
  EXPECT_NEAR(p.B_minus, -2 - 2 * ln2, 1e-14);
  EXPECT_NEAR(p.D_minus, 4.0, 1e-14);
  EXPECT_NEAR(p.C_minus, -4.0, 1e-14);
  EXPECT_NEAR(p.tau_star, ln2, 1e-15);
  EXPECT_NEAR(p.B_minus + p.Theta * p.D_minus, p.B_plus, 1e-14);
  EXPECT_NEAR(2 * p.A_minus + p.Theta * p.Theta * p.D_minus * std::exp(-p.tau_star), 0.0, 1e-14);
  EXPECT_NEAR(hhat_eval(p, 1.0, 0), 3 - 2 * ln2, 1e-14);
}

TEST(ValueFunction, AlternateCurvatureForm) {
  for (double delta : {0.5, 0.1, 0.01}) {
    for (double s2 : {0.5, 1.0}) {
      const auto p = build_params(delta, s2, sym(5, 2));
      const double theta = 2 * delta / s2;
      const double d_minus = (2 / std::pow(theta, 3)) * (5.0 + 2.0) / s2;
      EXPECT_NEAR(p.D_minus, d_minus, 1e-12 * d_minus);
    }
  }
}

TEST(ValueFunction, FloorConditions) {
  const auto p = build_params(0.1, 0.5, sym(5, 2));
  EXPECT_EQ(hhat_eval(p, 0.0, 0), 0.0);
  EXPECT_NEAR(hhat_eval(p, -p.tau_star, 1), 0.0, 1e-10);
  EXPECT_NEAR(hhat_eval(p, -p.tau_star, 2), 0.0, 1e-10);
}

TEST(ValueFunction, Errors) {
  try {
    build_params(0.0, 1.0, sym(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDrift);
  }
  try {
    build_params(0.1, 0.0, sym(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVariance);
  }
  EXPECT_THROW(build_params(0.1, 1.0, sym(1, 1), HTuning{1.0, 0.0, 10.0, 1.0}), Error);
}

TEST(ValueFunction, TildeValues) {
  auto t = tilde(0.0, 10.0);
  EXPECT_EQ(t.value, 0.0);
  EXPECT_EQ(t.deriv, 0.0);
  t = tilde(3.0, 3.0);
  EXPECT_NEAR(t.value, 3.0 / std::exp(1.0), 1e-15);
  EXPECT_NEAR(t.deriv, 1 - 1 / std::exp(1.0), 1e-15);
  t = tilde(1e4, 10.0);
  EXPECT_NEAR(t.value, 1e4 - 10.0, 1e-9);
  EXPECT_NEAR(t.deriv, 1.0, 1e-15);
  const auto w = tilde_signed(-3.0, 3.0);
  EXPECT_NEAR(w.value, -3.0 / std::exp(1.0), 1e-15);
  EXPECT_NEAR(w.deriv, 1 - 1 / std::exp(1.0), 1e-15);
  EXPECT_EQ(tilde_signed(0.0, 1.0).deriv, 0.0);
}

TEST(ValueFunction, GradientAtOrigin) {
  const auto g = fixtures::ring();
  const auto c = fixtures::ring_cost();
  const auto xi = workload_vector(g, {2});
  const auto p = build_params(0.1, 0.5, slopes(g, c, xi), {}, xi, c);
  const auto v = h_and_grad(p, std::vector<int>(6, 0));
  EXPECT_EQ(v.h, 0.0);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(v.grad[k], p.B_plus * xi.xi[k], 1e-15);
}

TEST(ValueFunction, GradientMatchesFiniteDifferences) {
  const auto g = fixtures::ring();
  const auto c = fixtures::ring_cost();
  const auto xi = workload_vector(g, {2});
  const auto p = build_params(0.05, 0.6, slopes(g, c, xi), {1.0, 0.01, 5.0, 0.5}, xi, c);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(6);
    for (double& v : x) v = u(rng);
    const auto got = h_and_grad(p, std::span<const double>(x)).grad;
    const auto fd = oracle::fd_gradient(
        [&](const std::vector<double>& y) { return h_and_grad(p, std::span<const double>(y)).h; },
        x, 1e-5);
    double scale = 1.0;
    for (double gk : got) scale = std::max(scale, std::abs(gk));
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(got[k], fd[k], 1e-6 * scale);
  }
}

TEST(ValueFunction, HBoundedBelowByFloor) {
  const auto g = fixtures::path2();
  const CostVector c{{1, 2, 3, 4}};
  const auto xi = workload_vector(g, {0});
  const auto p = build_params(0.1, 0.09, slopes(g, c, xi), {}, xi, c);
  const double floor = hhat_eval(p, -p.tau_star, 0);
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      for (int s = 0; s <= a + b; ++s) {
        const std::vector<int> x{a, b, s, a + b - s};
        const double h = h_and_grad(p, x).h;
        EXPECT_GE(h + 1e-12, hhat_eval(p, xi.dot(x), 0));
        EXPECT_GE(h + 1e-12, floor);
      }
    }
  }
}

TEST(ValueFunction, EffectiveRayKeepsPenaltyBounded) {
  const auto g = fixtures::ring();
  const auto c = fixtures::ring_cost();
  const auto xi = workload_vector(g, {2});
  const auto s = slopes(g, c, xi);
  const auto p = build_params(0.1, 0.5, s, {}, xi, c);
  for (double w : {50.0, 200.0, 1000.0, -50.0, -1000.0}) {
    const auto e = evaluate(s, 6, w);
    const double h = h_and_grad(p, std::span<const double>(e.x_star)).h;
    const double gap = h - hhat_eval(p, w, 0);
    EXPECT_GE(gap, 0.0);
    EXPECT_LT(gap, p.tuning.kappa * std::pow(2 * 10.0 * 3.0, 2));
  }
}

TEST(ValueFunction, ThresholdShiftMovesMinimum) {
  const auto g = fixtures::path2();
  const CostVector c{{1, 2, 3, 4}};
  const auto xi = workload_vector(g, {0});
  const auto p = build_params(0.1, 0.09, slopes(g, c, xi), {}, xi, c);
  const auto q = with_threshold(p, p.tau_star + 3.0);
  EXPECT_NEAR(q.shift, 3.0, 1e-15);
  EXPECT_EQ(with_threshold(p, p.tau_star).shift, 0.0);
}

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bmatch/arrivals.hpp"
#include "bmatch/error.hpp"
#include "instances.hpp"

using namespace bmatch;

TEST(Arrivals, PathMoments) {
  const auto g = fixtures::path2();
  const auto d = fixtures::path2_arrivals(g);
  const auto m = moments(g, d, workload_vector(g, {0}));
  EXPECT_EQ(m.alpha, (std::vector<double>{0.4, 0.6, 0.5, 0.5}));
  EXPECT_NEAR(m.delta, 0.1, 1e-15);
  EXPECT_NEAR(m.sigma2_delta, 0.09, 1e-15);
  EXPECT_NEAR(m.increment_probs[0], 0.1, 1e-15);
  EXPECT_NEAR(m.increment_probs[1], 0.9, 1e-15);
  EXPECT_EQ(m.increment_probs[2], 0.0);
}

TEST(Arrivals, MomentsMatchDirectSums) {
  const auto g = fixtures::ring();
  const auto d = fixtures::ring_arrivals(g);
  const auto xi = workload_vector(g, {2});
  const auto m = moments(g, d, xi);
  double mean = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < d.pairs().size(); ++k) {
    const int inc = xi.xi[d.pairs()[k].demand] + xi.xi[3 + d.pairs()[k].supply];
    mean += d.probs()[k] * inc;
    sq += d.probs()[k] * inc * inc;
  }
  EXPECT_NEAR(m.delta, -mean, 1e-14);
  EXPECT_NEAR(m.delta, 0.007, 1e-12);
  EXPECT_NEAR(m.sigma2_delta, sq - mean * mean, 1e-14);
}

TEST(Arrivals, Validation) {
  const auto g = fixtures::path2();
  try {
    build_distribution(g, {{{0, 0}, 0.5}, {{1, 1}, 0.4}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNormalized);
  }
  try {
    build_distribution(g, {{{0, 1}, 0.5}, {{1, 1}, 0.5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedPair);
  }
  const auto merged = build_distribution(g, {{{0, 0}, 0.25}, {{0, 0}, 0.25}, {{1, 1}, 0.5}});
  EXPECT_EQ(merged.pairs().size(), 2u);
  EXPECT_DOUBLE_EQ(merged.prob({0, 0}), 0.5);
}

TEST(Arrivals, SamplingFrequencies) {
  const auto g = fixtures::path2();
  const auto d = fixtures::path2_arrivals(g);
  Rng rng(5);
  std::map<Edge, int> counts;
  const int n = 200000;
  for (int k = 0; k < n; ++k) ++counts[d.sample(rng)];
  for (std::size_t k = 0; k < d.pairs().size(); ++k) {
    const double p = d.probs()[k];
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(counts[d.pairs()[k]] / static_cast<double>(n), p, 5 * se);
  }
}

TEST(Arrivals, SameSeedSameStream) {
  const auto g = fixtures::ring();
  const auto d = fixtures::ring_arrivals(g);
  Rng a(42), b(42);
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(d.sample(a), d.sample(b));
}

TEST(Arrivals, FamilyInterpolatesDrift) {
  const auto g = fixtures::ring();
  const auto xi = workload_vector(g, {2});
  ArrivalFamily fam{fixtures::product(g, {0.2, 0.2, 0.6}, {0.3, 0.4, 0.3}),
                    fixtures::product(g, {0.2, 0.2, 0.6}, {0.35, 0.3, 0.35})};
  for (double delta : {0.0, 0.007, 0.05, 0.1}) {
    EXPECT_NEAR(moments(g, fam.at(g, xi, delta), xi).delta, delta, 1e-12);
  }
  const auto at = fam.at(g, xi, 0.007);
  EXPECT_NEAR(at.alpha()[3], 0.3035, 1e-12);
  EXPECT_NEAR(at.alpha()[4], 0.393, 1e-12);
  EXPECT_THROW(fam.at(g, xi, 0.2), Error);
  EXPECT_GT(fam.linear_rate_constant(g, xi), 0.0);
}

TEST(Arrivals, AssumptionReport) {
  const auto g = fixtures::ring();
  const auto d = fixtures::ring_arrivals(g);
  const auto r = check_assumptions(g, d, workload_vector(g, {2}), 0.1, 0.01);
  EXPECT_NEAR(r.designated_drift, -0.007, 1e-12);
  EXPECT_NEAR(r.other_max_drift, -0.2, 1e-12);
  EXPECT_TRUE(r.a1_ok);
  EXPECT_TRUE(r.a3_ok);
  EXPECT_TRUE(r.split_connected);
  EXPECT_TRUE(r.warnings.empty());
}

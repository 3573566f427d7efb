#include <gtest/gtest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "bbmlab/brw.hpp"
#include "bbmlab/error.hpp"

using namespace bbmlab;

namespace {

// P(S_k <= x) for the sum of k displacements: Brownian motion with drift 2 and
// variance 2 run for a Gamma(k, 1) time.
double walk_cdf(int k, double x) {
  boost::math::gamma_distribution<> g(k, 1.0);
  boost::math::normal_distribution<> z;
  auto f = [&](double t) { return boost::math::pdf(g, t) * boost::math::cdf(z, (x - 2.0 * t) / std::sqrt(2.0 * t)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0, std::numeric_limits<double>::infinity(), 15,
                                                                        1e-12);
}

ExploreConfig config(double x, double B) {
  ExploreConfig c;
  c.level_x = x;
  c.barrier_B = B;
  return c;
}

}  // namespace

TEST(ExploreTree, GenerationWindowFirstMoment) {
  const ModelParams p = make_params(2.0);
  ExploreConfig c = config(2.0, 8.0);
  c.windows = {{0.0, 1.0, std::numeric_limits<double>::infinity()}};  // generations 0..4
  double expect = 0;
  for (int g = 0; g <= 4; ++g) expect += std::ldexp(walk_cdf(g + 1, 2.0), g);

  const RngStream base(99, 0);
  const int n = 20000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const CensoredCount r = explore_tree(p, c, base.split(i));
    ASSERT_EQ(r.status, CensorStatus::exact);
    const double v = static_cast<double>(r.window_counts[0]);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, expect, 5 * se + 1e-3) << "oracle " << expect;
}

TEST(ExploreTree, LargerBarrierNeverCountsLess) {
  const ModelParams p = make_params(2.0);
  const RngStream base(5, 0);
  for (int i = 0; i < 300; ++i) {
    const CensoredCount a = explore_tree(p, config(0.0, 4.0), base.split(i));
    const CensoredCount b = explore_tree(p, config(0.0, 6.0), base.split(i));
    ASSERT_EQ(a.status, CensorStatus::exact);
    ASSERT_EQ(b.status, CensorStatus::exact);
    EXPECT_LE(a.value, b.value) << i;
    EXPECT_LE(a.work, b.work);
  }
}

TEST(ExploreTree, Deterministic) {
  const ModelParams p = make_params(2.0);
  const RngStream r(8, 2);
  const CensoredCount a = explore_tree(p, config(1.0, 6.0), r);
  const CensoredCount b = explore_tree(p, config(1.0, 6.0), r);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.work, b.work);
  EXPECT_EQ(a.pruned_count, b.pruned_count);
}

TEST(ExploreTree, CapsAndInvariants) {
  const ModelParams p = make_params(2.0);
  const RngStream base(12, 0);
  for (int i = 0; i < 200; ++i) {
    ExploreConfig c = config(1.0, 6.0);
    c.count_cap = 3;
    const CensoredCount r = explore_tree(p, c, base.split(i));
    if (r.status == CensorStatus::count_capped) EXPECT_EQ(r.value, 3);
    else EXPECT_LT(r.value, 3);
    EXPECT_GE(r.work, r.value);
    EXPECT_DOUBLE_EQ(r.bias_bound, r.pruned_count * std::exp(-6.0));
  }
  ExploreConfig tight = config(1.0, 6.0);
  tight.node_cap = 2;
  bool capped = false;
  for (int i = 0; i < 50 && !capped; ++i) capped = explore_tree(p, tight, base.split(i)).status == CensorStatus::work_capped;
  EXPECT_TRUE(capped);
}

TEST(ExploreTree, WindowsAreNestedInTheCount) {
  const ModelParams p = make_params(2.0);
  ExploreConfig c = config(2.0, 6.0);
  c.windows = {{0.0, 1e9, std::numeric_limits<double>::infinity()}, {0.25, 1.0, 1.5}};
  const RngStream base(31, 0);
  for (int i = 0; i < 200; ++i) {
    const CensoredCount r = explore_tree(p, c, base.split(i));
    ASSERT_EQ(r.status, CensorStatus::exact);
    EXPECT_EQ(r.window_counts[0], r.value);
    EXPECT_LE(r.window_counts[1], r.value);
  }
}

TEST(ExploreTree, RejectsBadConfig) {
  const ModelParams p = make_params(2.0);
  const RngStream r(1, 0);
  EXPECT_THROW(explore_tree(p, config(0.0, 0.0), r), Error);
  ExploreConfig c = config(0.0, 5.0);
  c.windows = {{2.0, 1.0, 1.0}};
  EXPECT_THROW(explore_tree(p, c, r), Error);
  EXPECT_EQ(censor_status_from_string(to_string(CensorStatus::work_capped)), CensorStatus::work_capped);
  EXPECT_THROW(censor_status_from_string("nope"), Error);
}

TEST(AllTimeMin, InsideTheBarrierOrEmpty) {
  const ModelParams p = make_params(2.0);
  const RngStream base(2, 0);
  for (int i = 0; i < 50; ++i) {
    const AllTimeMin m = sample_alltime_min(p, config(0.0, 5.0), base.split(i));
    EXPECT_EQ(m.status, CensorStatus::exact);
    // A root born above the barrier leaves nothing explored.
    EXPECT_TRUE(std::isinf(m.value) || m.value <= 5.0);
  }
}

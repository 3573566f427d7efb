#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bbmlab/error.hpp"
#include "bbmlab/stats.hpp"

using namespace bbmlab;

TEST(ClopperPearson, TabulatedValues) {
  const auto [lo, hi] = clopper_pearson(5, 10);
  EXPECT_NEAR(lo, 0.187086, 1e-6);
  EXPECT_NEAR(hi, 0.812914, 1e-6);
  const auto [lo0, hi0] = clopper_pearson(0, 10);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_NEAR(hi0, 1.0 - std::pow(0.025, 0.1), 1e-12);
  EXPECT_EQ(clopper_pearson(10, 10).second, 1.0);
  EXPECT_THROW(clopper_pearson(11, 10), Error);
}

TEST(PairwiseSum, MatchesLongDouble) {
  std::vector<double> v;
  RngStream r(1, 0);
  long double ref = 0;
  for (int i = 0; i < 100001; ++i) {
    v.push_back(r.uniform() * 1e6);
    ref += v.back();
  }
  EXPECT_NEAR(pairwise_sum(v), static_cast<double>(ref), 4 * (std::nextafter(static_cast<double>(ref), INFINITY) - static_cast<double>(ref)));
}

TEST(MeanAccumulator, MergeOrderDoesNotMatter) {
  RngStream r(2, 0);
  std::vector<MeanAccumulator> parts;
  for (int b = 0; b < 13; ++b) {
    std::vector<double> v(37 + b);
    for (double& x : v) x = r.exponential();
    parts.push_back(MeanAccumulator::from_batch(b, v));
  }
  MeanAccumulator fwd, bwd;
  for (const auto& p : parts) fwd.merge(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) bwd.merge(*it);
  EXPECT_EQ(fwd.estimate().value, bwd.estimate().value);
  EXPECT_EQ(fwd.estimate().std_error, bwd.estimate().std_error);
  EXPECT_EQ(fwd.count(), bwd.count());
  EXPECT_THROW(fwd.merge(parts[3]), Error);
}

TEST(EmpiricalTail, CensoringRules) {
  const EmpiricalTail t({0, 3, 10, 50, 7}, 10);
  EXPECT_EQ(t.censored(), 2);
  EXPECT_EQ(t.count_at_least(10), 2);
  EXPECT_THROW(t.count_at_least(11), Error);
  EXPECT_EQ(t.quantile(0.4), 3);
  EXPECT_THROW(t.quantile(0.9), Error);

  std::vector<CensoredCount> c(4);
  c[0].value = 2;
  c[1].value = 9;
  c[1].status = CensorStatus::count_capped;
  c[2].status = CensorStatus::work_capped;
  c[3].value = 1;
  const EmpiricalTail f = EmpiricalTail::from_counts(c, 9);
  EXPECT_EQ(f.total(), 3);
  EXPECT_EQ(f.excluded(), 1);
  EXPECT_DOUBLE_EQ(f.excluded_fraction(), 0.25);
  EXPECT_THROW(EmpiricalTail::from_counts(c, std::nullopt), Error);
}

TEST(TailRatio, ExactCounts) {
  const EmpiricalTail t({1, 2, 3, 4, 100, 200, 0, 0, 0, 0}, std::nullopt);
  const EstimateCI e = tail_ratio(t, 100);
  EXPECT_DOUBLE_EQ(e.value, 100 * 0.2);
  EXPECT_LE(e.lo, e.value);
  EXPECT_GE(e.hi, e.value);
}

TEST(TruncatedMean, SmallSample) {
  const EmpiricalTail t({0, 1, 2, 5}, std::nullopt);
  EXPECT_NEAR(truncated_mean_offset(t, 3).value, 3.0 / 4.0 - std::log(3.0), 1e-15);
  EXPECT_THROW(truncated_mean_offset(EmpiricalTail({1, 2}, 3), 3), Error);
}

TEST(LaplaceTransform, PoissonGeneratingFunction) {
  std::mt19937_64 g(5);
  std::poisson_distribution<std::int64_t> pois(3.0);
  std::vector<std::int64_t> v(200000);
  for (auto& x : v) x = pois(g);
  const EmpiricalTail t(v, std::nullopt);
  const double lambda = 0.5;
  const EstimateCI e = laplace_log_transform(t, lambda);
  EXPECT_NEAR(e.value, 3.0 * (std::exp(-lambda) - 1.0), 5 * e.std_error);
  EXPECT_THROW(laplace_log_transform(EmpiricalTail({1}, 10), 0.1), Error);
}

TEST(FunctionalEquation, DegenerateLineIsAnIdentity) {
  // Z = 1 on every line makes N_x equal in law to N; both sides reduce to phi(lambda, 0).
  const EmpiricalTail n({0, 1, 1, 3, 8, 2}, std::nullopt);
  const std::vector<std::int64_t> z(50, 1);
  const FunctionalEquation fe = functional_equation_check(n, n, z, 0.1, 1.0);
  EXPECT_NEAR(fe.lhs.value, fe.rhs.value, 1e-14);
  EXPECT_NEAR(fe.phi0.value, fe.lhs.value, 1e-14);
}

TEST(LogLogSlope, ParetoTail) {
  // floor(1/U) has P(N >= n) = 1/n exactly.
  RngStream r(3, 0);
  std::vector<std::int64_t> v(400000);
  for (auto& x : v) x = static_cast<std::int64_t>(std::floor(1.0 / r.uniform()));
  const EmpiricalTail t(v, std::nullopt);
  const std::vector<std::int64_t> grid{10, 30, 100, 300, 1000};
  const SlopeFit f = loglog_slope(t, grid);
  EXPECT_NEAR(f.slope.value, -1.0, 4 * f.slope.std_error + 0.01);
  for (const auto& p : f.points) EXPECT_TRUE(p.used);
  const std::vector<std::int64_t> far{100000, 200000, 300000};
  EXPECT_THROW(loglog_slope(t, far), Error);
}

TEST(RankTest, UniformPValuesUnderTheNull) {
  RngStream r(4, 0);
  std::vector<double> p;
  auto draw = [&](int n) {
    std::vector<std::int64_t> v(n);
    for (auto& x : v) x = static_cast<std::int64_t>(std::floor(r.exponential() * 3.0));
    return v;
  };
  for (int k = 0; k < 300; ++k) {
    p.push_back(two_sample_rank_test(EmpiricalTail(draw(150), std::nullopt), EmpiricalTail(draw(170), std::nullopt)).p_value);
  }
  EXPECT_GT(ks_uniform_pvalue(p), 0.001);
}

TEST(RankTest, DetectsShiftAndCensoredExcess) {
  std::vector<std::int64_t> a(500), b(500);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 100);
  EXPECT_LT(two_sample_rank_test(EmpiricalTail(a, std::nullopt), EmpiricalTail(b, std::nullopt)).p_value, 1e-6);

  std::vector<std::int64_t> c(500, 1), d(500, 1);
  std::fill(d.begin(), d.begin() + 100, 1000);
  const RankTestResult r = two_sample_rank_test(EmpiricalTail(c, 50), EmpiricalTail(d, 50));
  ASSERT_TRUE(r.p_censored.has_value());
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_THROW(two_sample_rank_test(EmpiricalTail(c, 50), EmpiricalTail(d, 60)), Error);
}

TEST(KsUniform, Extremes) {
  std::vector<double> even(1000), bunched(1000, 0.01);
  for (int i = 0; i < 1000; ++i) even[i] = (i + 0.5) / 1000;
  EXPECT_GT(ks_uniform_pvalue(even), 0.99);
  EXPECT_LT(ks_uniform_pvalue(bunched), 1e-10);
}

TEST(Quantiles, TypeSeven) {
  EXPECT_DOUBLE_EQ(sample_quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(sample_quantile({4, 1, 3, 2}, 0.25), 1.75);
  const std::vector<std::pair<std::int64_t, std::int64_t>> pairs{{4, 1}, {6, 1}, {10, 2}};
  EXPECT_DOUBLE_EQ(ratio_convergence(pairs, 2.0).median, 2.5);
}

TEST(Bootstrap, StandardErrorOfTheMean) {
  RngStream r(5, 0);
  std::vector<double> v(2000);
  for (double& x : v) x = r.normal();
  const EstimateCI e = bootstrap_mean(v, 1000, RngStream(6, 0));
  EXPECT_NEAR(e.std_error, 1.0 / std::sqrt(2000.0), 0.15 / std::sqrt(2000.0));
}

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "bbmlab/error.hpp"
#include "bbmlab/sampler.hpp"
#include "bbmlab/stats.hpp"

using namespace bbmlab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename F>
double integrate(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}
}  // namespace

TEST(ModelParams, RatesSolveTheQuadratic) {
  for (double mu : {2.0, 2.1, 3.0}) {
    const ModelParams p = make_params(mu);
    // Roots of 1 - mu*theta - theta^2 (sigma^2 = 2) are r_plus and -r_minus.
    EXPECT_NEAR(1 - mu * p.r_plus - p.r_plus * p.r_plus, 0.0, 1e-14);
    EXPECT_NEAR(1 + mu * p.r_minus - p.r_minus * p.r_minus, 0.0, 1e-14);
  }
  EXPECT_THROW(make_params(-1.0), Error);
}

TEST(DisplacementLaw, DensityIntegratesToOneWithBrownianMoments) {
  const ModelParams p = make_params(2.0);
  const DisplacementLaw law(p);
  auto pdf = [&](double x) { return law.pdf(x); };
  EXPECT_NEAR(integrate(pdf, -kInf, 0) + integrate(pdf, 0, kInf), 1.0, 1e-10);
  // Brownian motion with drift 2, variance 2, run for an Exp(1) time: mean 2, variance 2 + 4.
  EXPECT_NEAR(law.mean(), 2.0, 1e-12);
  EXPECT_NEAR(law.variance(), 6.0, 1e-12);
}

TEST(DisplacementLaw, MomentGeneratingFunction) {
  const ModelParams p = make_params(2.0);
  const DisplacementLaw law(p);
  for (double th : {-0.3, 0.1, 0.3}) {
    auto f = [&](double x) { return law.pdf(x) * std::exp(th * x); };
    const double mgf = integrate(f, -80, 0) + integrate(f, 0, 200);
    EXPECT_NEAR(mgf, 1.0 / (1.0 - 2.0 * th - th * th), 1e-9) << th;
  }
}

TEST(DisplacementLaw, CdfQuantileRoundTrip) {
  const DisplacementLaw law(make_params(2.0));
  for (double u : {1e-6, 0.01, 0.1, 0.5, 0.9, 0.999999}) EXPECT_NEAR(law.cdf(law.quantile(u)), u, 1e-12);
}

TEST(DisplacementLaw, SamplesMatchBrownianMotionAtExponentialTime) {
  const ModelParams p = make_params(2.0);
  const DisplacementLaw law(p);
  RngStream r(3, 0);
  // Chi-square against the closed-form cdf on 20 equiprobable cells.
  const int n = 200000, cells = 20;
  std::vector<int> counts(cells, 0);
  for (int i = 0; i < n; ++i) {
    const double x = law.sample(r);
    counts[std::min(cells - 1, static_cast<int>(law.cdf(x) * cells))]++;
  }
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / double(cells)) * (c - n / double(cells)) / (n / double(cells));
  EXPECT_LT(chi2, 43.8);  // 0.999 quantile of chi2(19)

  // Direct construction from an exponential time and a Gaussian.
  boost::math::normal_distribution<> z;
  for (double x : {-1.0, 0.0, 1.5, 4.0}) {
    auto integrand = [&](double t) { return std::exp(-t) * boost::math::cdf(z, (x - 2.0 * t) / std::sqrt(2.0 * t)); };
    EXPECT_NEAR(law.cdf(x), integrate(integrand, 0, kInf), 1e-8) << x;
  }
}

TEST(SpineStepLaw, IsTheTiltedDisplacementLaw) {
  const ModelParams p = make_params(2.0);
  const DisplacementLaw law(p);
  const SpineStepLaw spine = spine_step_law(p);
  for (double x : {-3.0, -0.5, 0.25, 2.0, 6.0}) EXPECT_NEAR(2.0 * std::exp(-x) * law.pdf(x), spine.pdf(x), 1e-13);
  EXPECT_THROW(spine_step_law(make_params(2.1)), Error);
}

TEST(EdgeCrossing, MatchesDiscretizedBridge) {
  // Bridge from 0 to w over time T with variance 2; crossing of level m.
  const double m = 1.0, w = 0.3, T = 0.8;
  const double closed = edge_crossing_prob(m, w, T);
  EXPECT_NEAR(closed, std::exp(-m * (m - w) / T), 1e-15);

  RngStream r(17, 0);
  const int paths = 4000, steps = 2000;
  const double dt = T / steps;
  int hits = 0;
  std::vector<double> b(steps + 1);
  for (int k = 0; k < paths; ++k) {
    b[0] = 0;
    for (int i = 1; i <= steps; ++i) b[i] = b[i - 1] + std::sqrt(2 * dt) * r.normal();
    double mx = 0;
    for (int i = 0; i <= steps; ++i) mx = std::max(mx, b[i] - (b[steps] - w) * i / steps);
    hits += mx >= m;
  }
  // The grid misses some excursions, so the discrete estimate sits slightly low.
  const double est = double(hits) / paths;
  EXPECT_NEAR(est, closed, 0.04);
  EXPECT_EQ(edge_crossing_prob(1.0, 2.0, 1.0), 1.0);
  EXPECT_THROW(edge_crossing_prob(1.0, 0.0, 0.0), Error);
}

TEST(EdgeHit, KilledDriftedBrownianMotion) {
  const ModelParams p = make_params(2.0);
  // E[exp(-tau_a)] for drift mu and variance s2: exp(-a (sqrt(mu^2 + 2 s2) - mu) / s2).
  for (double d : {0.0, 0.5, 2.0}) {
    EXPECT_NEAR(edge_hit_probability(d, Direction::up, p), std::exp(-d * (std::sqrt(4.0 + 4.0) - 2.0) / 2.0), 1e-14);
    EXPECT_NEAR(edge_hit_probability(d, Direction::down, p), std::exp(-d * (std::sqrt(4.0 + 4.0) + 2.0) / 2.0), 1e-14);
  }
}

TEST(EdgeHit, SampledEdgesReproduceHitProbability) {
  // Follow one lineage, dropping it with probability 1/2 at each branching.
  const ModelParams p = make_params(2.0);
  RngStream r(23, 0);
  const int n = 100000;
  for (auto [barrier, dir] : {std::pair{1.0, Direction::up}, std::pair{-0.5, Direction::down}}) {
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      double pos = 0;
      for (;;) {
        const EdgeOutcome e = sample_edge(pos, barrier, dir, p, r);
        if (std::holds_alternative<Crossed>(e)) {
          ++hits;
          break;
        }
        pos = std::get<Died>(e).position;
        if (r.uniform() < 0.5) break;
      }
    }
    // One line with death probability 1/2 at each branching is a killed motion with rate 1/2.
    const double mu = 2.0, s2 = 2.0, q = 0.5;
    const double root = std::sqrt(mu * mu + 2 * s2 * q);
    const double rate = dir == Direction::up ? (root - mu) / s2 : (root + mu) / s2;
    const double expect = std::exp(-rate * std::abs(barrier));
    const double est = double(hits) / n;
    EXPECT_NEAR(est, expect, 5 * std::sqrt(expect * (1 - expect) / n)) << barrier;
  }
}

TEST(EdgeSample, RejectsBarrierOnWrongSide) {
  const ModelParams p = make_params(2.0);
  RngStream r(1, 1);
  EXPECT_THROW(sample_edge(1.0, 0.0, Direction::up, p, r), Error);
  EXPECT_THROW(sample_edge(-1.0, 0.0, Direction::down, p, r), Error);
}

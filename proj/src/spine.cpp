#include "bbmlab/spine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bbmlab/error.hpp"

namespace bbmlab {
namespace {

// Running sum and minimum of an n-step walk, drawing each step with `step`.
template <typename Step>
std::pair<double, double> walk(int n, RngStream& rng, Step&& step) {
  double s = 0.0;
  double lo = 0.0;
  for (int k = 0; k < n; ++k) {
    s += step(rng);
    lo = std::min(lo, s);
  }
  return {s, lo};
}

EstimateCI mean_estimate(const std::vector<double>& v, double scale) {
  const MeanAccumulator acc = MeanAccumulator::from_batch(0, v);
  EstimateCI e = acc.estimate();
  return normal_estimate(scale * e.value, scale * e.std_error, e.n_samples);
}

double probe_scale(BallotKind kind, int n, double alpha, double h, double a) {
  const double dn = static_cast<double>(n);
  switch (kind) {
    case BallotKind::local_limit: return std::sqrt(dn);
    case BallotKind::ballot: return std::sqrt(dn) / (1.0 + alpha);
    case BallotKind::ballot_backward: return dn / (1.0 + h);
    case BallotKind::three_factor: return std::pow(dn, 1.5) / ((1.0 + alpha) * (1.0 + a + h + alpha) * (1.0 + h));
  }
  return 1.0;
}

void check_probe(const ProbeSpec& s, int n) {
  if (n < 1) fail(Errc::invalid_argument, "probe needs n >= 1");
  if (s.kind == BallotKind::local_limit) return;
  if (!(s.alpha > 0.0)) fail(Errc::invalid_argument, "probe needs alpha > 0");
  if (s.kind == BallotKind::ballot) return;
  if (!(s.h > 0.0)) fail(Errc::invalid_argument, "probe needs h > 0");
  if (s.kind == BallotKind::three_factor) {
    if (!(s.a > -s.alpha)) fail(Errc::invalid_argument, "three_factor probe needs a > -alpha");
    if (n > 400) fail(Errc::precondition, "three_factor probe needs n <= 400");
  }
}

// Largest number of points in any closed window [z, z+1] of a sorted sample.
std::int64_t max_unit_window(const std::vector<double>& sorted) {
  std::size_t best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < sorted.size(); ++hi) {
    while (sorted[hi] - sorted[lo] > 1.0) ++lo;
    best = std::max(best, hi - lo + 1);
  }
  return static_cast<std::int64_t>(best);
}

}  // namespace

SpinePath simulate_spine(int n, double start, RngStream& rng) {
  if (n < 0) fail(Errc::invalid_argument, "spine length must be >= 0");
  const SpineStepLaw law;
  SpinePath path;
  path.values.reserve(static_cast<std::size_t>(n) + 1);
  path.values.push_back(start);
  path.running_min = path.running_max = start;
  for (int k = 0; k < n; ++k) {
    const double s = path.values.back() + law.sample(rng);
    path.values.push_back(s);
    path.running_min = std::min(path.running_min, s);
    path.running_max = std::max(path.running_max, s);
  }
  return path;
}

ManyToOneResult many_to_one_check(const PathEvent& f, int n, std::int64_t samples, const RngStream& rng,
                                  const ModelParams& params) {
  if (n < 1 || n > 10) fail(Errc::invalid_argument, "many-to-one check needs 1 <= n <= 10");
  const SpineStepLaw spine = spine_step_law(params);
  const double two_n = std::ldexp(1.0, n);
  if (f.is_constant()) {
    // E[e^{S_1}] = 2 for the Laplace(sqrt 2) step, so both sides equal 2^n.
    const EstimateCI exact = normal_estimate(two_n, 0.0, 0);
    return {exact, exact};
  }
  if (!(f.upper <= 2.0)) fail(Errc::invalid_argument, "path functional must be supported on {S_n <= K}, K <= 2");
  if (samples < 2) fail(Errc::invalid_argument, "many-to-one check needs at least 2 samples");

  const DisplacementLaw disp(params);
  const auto m = static_cast<std::size_t>(samples);
  std::vector<double> left(m);
  std::vector<double> right(m);
  RngStream lrng = rng.split(1);
  RngStream rrng = rng.split(2);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [s, lo] = walk(n, lrng, [&](RngStream& r) { return disp.sample(r); });
    left[i] = f(s, lo) ? 1.0 : 0.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto [s, lo] = walk(n, rrng, [&](RngStream& r) { return spine.sample(r); });
    right[i] = f(s, lo) ? std::exp(s) : 0.0;
  }
  return {mean_estimate(left, two_n), mean_estimate(right, 1.0)};
}

std::string_view to_string(BallotKind kind) noexcept {
  switch (kind) {
    case BallotKind::local_limit: return "local_limit";
    case BallotKind::ballot: return "ballot";
    case BallotKind::ballot_backward: return "ballot_backward";
    case BallotKind::three_factor: return "three_factor";
  }
  return "ballot";
}

BallotKind ballot_kind_from_string(std::string_view text) {
  for (const BallotKind k :
       {BallotKind::local_limit, BallotKind::ballot, BallotKind::ballot_backward, BallotKind::three_factor}) {
    if (to_string(k) == text) return k;
  }
  fail(Errc::invalid_argument, "unknown probe kind '" + std::string(text) + "'");
}

std::vector<BallotProbe> ballot_probes(const std::vector<ProbeSpec>& specs, int n, std::int64_t samples,
                                       const RngStream& rng) {
  for (const ProbeSpec& s : specs) check_probe(s, n);
  if (samples < 2) fail(Errc::invalid_argument, "probe needs at least 2 samples");

  const SpineStepLaw law;
  const auto m = static_cast<std::size_t>(samples);
  std::vector<double> end(m);
  std::vector<double> low(m);
  RngStream s = rng;
  for (std::size_t i = 0; i < m; ++i) {
    std::tie(end[i], low[i]) = walk(n, s, [&](RngStream& r) { return law.sample(r); });
  }

  std::vector<BallotProbe> out;
  for (const ProbeSpec& spec : specs) {
    BallotProbe probe;
    probe.kind = spec.kind;
    probe.n = n;
    probe.alpha = spec.alpha;
    probe.h = spec.h;
    probe.a = spec.a;
    std::int64_t hits = 0;
    switch (spec.kind) {
      case BallotKind::local_limit: {
        std::vector<double> sorted = end;
        std::sort(sorted.begin(), sorted.end());
        hits = max_unit_window(sorted);
        break;
      }
      case BallotKind::ballot:
        for (std::size_t i = 0; i < m; ++i) hits += low[i] >= -spec.alpha;
        break;
      case BallotKind::ballot_backward: {
        const double z = spec.h - spec.alpha;
        for (std::size_t i = 0; i < m; ++i) hits += low[i] >= -spec.alpha && end[i] >= z && end[i] <= z + 1.0;
        break;
      }
      case BallotKind::three_factor:
        for (std::size_t i = 0; i < m; ++i) {
          hits += low[i] >= -spec.alpha && end[i] >= spec.a && end[i] <= spec.a + spec.h;
        }
        break;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(m);
    const auto [lo, hi] = clopper_pearson(hits, samples);
    probe.estimate = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(m)), 0.95, samples, lo, hi};
    probe.hits = hits;
    probe.starved = hits < kMinHits;
    probe.fitted_constant = p * probe_scale(spec.kind, n, spec.alpha, spec.h, spec.a);
    out.push_back(probe);
  }
  return out;
}

BallotProbe ballot_probe(BallotKind kind, int n, double alpha, double h, double a, std::int64_t samples,
                         const RngStream& rng) {
  return ballot_probes({ProbeSpec{kind, alpha, h, a}}, n, samples, rng).front();
}

BoundaryMoments boundary_identities(const ModelParams& params) {
  if (!params.is_boundary()) fail(Errc::invalid_argument, "boundary identities need mu = 2");
  const DisplacementLaw law(params);
  constexpr double kTol = 1e-10;
  auto integrate = [&](auto weight) {
    using boost::math::quadrature::gauss_kronrod;
    double err_neg = 0.0;
    double err_pos = 0.0;
    // e^{-v} overflows where the density underflows; combine the exponents.
    auto f = [&](double v) { return weight(v) * std::exp(std::log(law.pdf(v)) - v); };
    const double neg = gauss_kronrod<double, 61>::integrate(f, -INFINITY, 0.0, 15, 1e-14, &err_neg);
    const double pos = gauss_kronrod<double, 61>::integrate(f, 0.0, INFINITY, 15, 1e-14, &err_pos);
    if (err_neg > kTol || err_pos > kTol) fail(Errc::internal, "quadrature did not reach 1e-10");
    return 2.0 * (neg + pos);
  };
  return {integrate([](double) { return 1.0; }), integrate([](double v) { return v; }),
          integrate([](double v) { return v * v; })};
}

}  // namespace bbmlab

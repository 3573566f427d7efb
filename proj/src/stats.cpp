#include "bbmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

#include "bbmlab/error.hpp"

namespace bbmlab {
namespace {

double z_for(double level) {
  if (!(level > 0.0 && level < 1.0)) fail(Errc::invalid_argument, "confidence level must be in (0,1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
}

double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

struct Moments {
  double mean;
  double sd;
};

Moments moments(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - mean) * (v[i] - mean);
  const double var = v.size() > 1 ? pairwise_sum(dev) / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var)};
}

void require_samples(const EmpiricalTail& tail) {
  if (tail.total() == 0) fail(Errc::sample_starved, "empty sample");
}

}  // namespace

EstimateCI normal_estimate(double value, double std_error, std::int64_t n_samples, double level) {
  const double z = z_for(level);
  return {value, std_error, level, n_samples, value - z * std_error, value + z * std_error};
}

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanAccumulator MeanAccumulator::from_batch(std::uint64_t batch, std::span<const double> values) {
  std::vector<double> squares(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) squares[i] = values[i] * values[i];
  MeanAccumulator acc;
  acc.partials_.push_back({batch, static_cast<std::int64_t>(values.size()), pairwise_sum(values), pairwise_sum(squares)});
  return acc;
}

MeanAccumulator& MeanAccumulator::merge(const MeanAccumulator& other) {
  std::vector<Partial> merged;
  merged.reserve(partials_.size() + other.partials_.size());
  std::merge(partials_.begin(), partials_.end(), other.partials_.begin(), other.partials_.end(),
             std::back_inserter(merged), [](const Partial& l, const Partial& r) { return l.batch < r.batch; });
  for (std::size_t i = 1; i < merged.size(); ++i) {
    if (merged[i].batch == merged[i - 1].batch) {
      fail(Errc::invalid_argument, "batch " + std::to_string(merged[i].batch) + " merged twice");
    }
  }
  partials_ = std::move(merged);
  return *this;
}

std::int64_t MeanAccumulator::count() const noexcept {
  std::int64_t n = 0;
  for (const Partial& p : partials_) n += p.count;
  return n;
}

EstimateCI MeanAccumulator::estimate(double level) const {
  const std::int64_t n = count();
  if (n == 0) fail(Errc::sample_starved, "no samples accumulated");
  std::vector<double> sums;
  std::vector<double> squares;
  for (const Partial& p : partials_) {
    sums.push_back(p.sum);
    squares.push_back(p.sum_sq);
  }
  const auto dn = static_cast<double>(n);
  const double mean = pairwise_sum(sums) / dn;
  const double var = n > 1 ? std::max(0.0, (pairwise_sum(squares) - dn * mean * mean) / (dn - 1.0)) : 0.0;
  return normal_estimate(mean, std::sqrt(var / dn), n, level);
}

EmpiricalTail::EmpiricalTail(std::vector<std::int64_t> values, std::optional<std::int64_t> censor_threshold,
                             std::int64_t excluded)
    : values_(std::move(values)), threshold_(censor_threshold), excluded_(excluded) {
  if (threshold_ && *threshold_ < 1) fail(Errc::invalid_argument, "censor threshold must be >= 1");
  if (excluded_ < 0) fail(Errc::invalid_argument, "excluded count must be >= 0");
  for (std::int64_t& v : values_) {
    if (v < 0) fail(Errc::invalid_argument, "counts must be >= 0");
    if (threshold_) v = std::min(v, *threshold_);
  }
  std::sort(values_.begin(), values_.end());
}

EmpiricalTail EmpiricalTail::from_counts(std::span<const CensoredCount> samples,
                                         std::optional<std::int64_t> censor_threshold) {
  std::vector<std::int64_t> values;
  values.reserve(samples.size());
  std::int64_t excluded = 0;
  for (const CensoredCount& c : samples) {
    if (c.status == CensorStatus::work_capped) {
      ++excluded;
      continue;
    }
    if (c.status == CensorStatus::count_capped && !censor_threshold) {
      fail(Errc::censoring, "count_capped sample without a censor threshold");
    }
    values.push_back(c.status == CensorStatus::count_capped ? *censor_threshold : c.value);
  }
  return EmpiricalTail(std::move(values), censor_threshold, excluded);
}

double EmpiricalTail::excluded_fraction() const noexcept {
  const auto all = static_cast<double>(total() + excluded_);
  return all > 0 ? static_cast<double>(excluded_) / all : 0.0;
}

std::int64_t EmpiricalTail::censored() const noexcept {
  if (!threshold_) return 0;
  return values_.end() - std::lower_bound(values_.begin(), values_.end(), *threshold_);
}

std::int64_t EmpiricalTail::count_at_least(std::int64_t n) const {
  if (threshold_ && n > *threshold_) {
    fail(Errc::censoring, "tail query at " + std::to_string(n) + " beyond censor threshold " + std::to_string(*threshold_));
  }
  return values_.end() - std::lower_bound(values_.begin(), values_.end(), n);
}

std::int64_t EmpiricalTail::quantile(double q) const {
  require_samples(*this);
  if (!(q > 0.0 && q <= 1.0)) fail(Errc::invalid_argument, "quantile level must be in (0,1]");
  const auto m = static_cast<double>(values_.size());
  const auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(q * m) - 1.0));
  const std::int64_t v = values_[std::min(idx, values_.size() - 1)];
  if (threshold_ && v >= *threshold_) fail(Errc::censoring, "quantile falls in the censored block");
  return v;
}

std::pair<double, double> clopper_pearson(std::int64_t k, std::int64_t n, double level) {
  if (n <= 0 || k < 0 || k > n) fail(Errc::invalid_argument, "clopper_pearson needs 0 <= k <= n, n >= 1");
  const double alpha = 1.0 - level;
  const auto dk = static_cast<double>(k);
  const auto dn = static_cast<double>(n);
  const double lo = k == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(dk, dn - dk + 1.0), alpha / 2);
  const double hi = k == n ? 1.0 : boost::math::quantile(boost::math::beta_distribution<>(dk + 1.0, dn - dk), 1 - alpha / 2);
  return {lo, hi};
}

EstimateCI tail_ratio(const EmpiricalTail& tail, std::int64_t n, double level) {
  require_samples(tail);
  if (n < 1) fail(Errc::invalid_argument, "tail threshold must be >= 1");
  const std::int64_t k = tail.count_at_least(n);
  const std::int64_t m = tail.total();
  const double p = static_cast<double>(k) / static_cast<double>(m);
  const auto dn = static_cast<double>(n);
  const auto [lo, hi] = clopper_pearson(k, m, level);
  return {dn * p, dn * std::sqrt(p * (1.0 - p) / static_cast<double>(m)), level, m, dn * lo, dn * hi};
}

EstimateCI truncated_mean_offset(const EmpiricalTail& tail, std::int64_t n, double level) {
  require_samples(tail);
  if (n < 1) fail(Errc::invalid_argument, "truncation point must be >= 1");
  if (tail.censor_threshold() && n >= *tail.censor_threshold()) {
    fail(Errc::censoring, "truncated mean at " + std::to_string(n) + " needs n below the censor threshold");
  }
  // Exact integer sums; the result does not depend on summation order.
  const auto& v = tail.sorted_values();
  __int128 sum = 0;
  __int128 sum_sq = 0;
  for (auto it = v.begin(); it != v.end() && *it <= n; ++it) {
    sum += *it;
    sum_sq += static_cast<__int128>(*it) * *it;
  }
  const auto m = static_cast<double>(v.size());
  const double mean = static_cast<double>(sum) / m;
  const double var = v.size() > 1 ? std::max(0.0, (static_cast<double>(sum_sq) - m * mean * mean) / (m - 1.0)) : 0.0;
  return normal_estimate(mean - std::log(static_cast<double>(n)), std::sqrt(var / m), tail.total(), level);
}

EstimateCI laplace_log_transform(const EmpiricalTail& tail, double lambda, double level) {
  require_samples(tail);
  if (!(lambda > 0.0)) fail(Errc::invalid_argument, "lambda must be > 0");
  if (tail.censor_threshold() && lambda * static_cast<double>(*tail.censor_threshold()) < 30.0) {
    fail(Errc::censoring, "lambda * censor_threshold must be >= 30");
  }
  std::vector<double> w(tail.sorted_values().size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(-lambda * static_cast<double>(tail.sorted_values()[i]));
  const Moments mo = moments(w);
  const double se = mo.sd / (std::sqrt(static_cast<double>(w.size())) * mo.mean);
  return normal_estimate(std::log(mo.mean), se, tail.total(), level);
}

EstimateCI laplace_expansion_check(const EmpiricalTail& tail, double lambda, double level) {
  const EstimateCI phi = laplace_log_transform(tail, lambda, level);
  return normal_estimate((phi.value - lambda * std::log(lambda)) / lambda, phi.std_error / lambda, phi.n_samples, level);
}

FunctionalEquation functional_equation_check(const EmpiricalTail& n_samples, const EmpiricalTail& n_x_samples,
                                             std::span<const std::int64_t> z_counts, double lambda, double x,
                                             double level) {
  if (z_counts.empty()) fail(Errc::sample_starved, "no line samples");
  FunctionalEquation out;
  out.lhs = laplace_log_transform(n_x_samples, lambda, level);
  out.phi0 = laplace_log_transform(n_samples, lambda, level);

  const double shift = x > 0.0 ? out.phi0.value - lambda : out.phi0.value;
  std::vector<double> g(z_counts.size());
  std::vector<double> zg(z_counts.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (z_counts[i] < 1) fail(Errc::invalid_argument, "z_count must be >= 1");
    const auto z = static_cast<double>(z_counts[i]);
    g[i] = std::exp(shift * z);
    zg[i] = z * g[i];
  }
  const Moments mo = moments(g);
  const auto m = static_cast<double>(g.size());
  const double z_weighted = pairwise_sum(zg) / pairwise_sum(g);
  const double se_line = mo.sd / (std::sqrt(m) * mo.mean);
  const double se = std::hypot(se_line, z_weighted * out.phi0.std_error);
  const double value = (x > 0.0 ? lambda : 0.0) + std::log(mo.mean);
  out.rhs = normal_estimate(value, se, static_cast<std::int64_t>(g.size()), level);
  return out;
}

SlopeFit loglog_slope(const EmpiricalTail& tail, std::span<const std::int64_t> grid, double log_log_power,
                      double level) {
  require_samples(tail);
  SlopeFit fit;
  const auto m = static_cast<double>(tail.total());
  double sw = 0.0;
  double swx = 0.0;
  double swy = 0.0;
  std::vector<double> w;
  for (const std::int64_t n : grid) {
    if (n < 2) fail(Errc::invalid_argument, "slope grid points must be >= 2");
    SlopePoint pt;
    pt.n = n;
    pt.hits = tail.count_at_least(n);
    pt.log_n = std::log(static_cast<double>(n));
    const double p = static_cast<double>(pt.hits) / m;
    pt.used = pt.hits >= kMinTailHits && pt.hits < tail.total();
    pt.log_p = pt.hits > 0 ? std::log(p) + log_log_power * std::log(pt.log_n) : -INFINITY;
    const double wi = pt.used ? static_cast<double>(pt.hits) / (1.0 - p) : 0.0;
    sw += wi;
    swx += wi * pt.log_n;
    swy += wi * (pt.used ? pt.log_p : 0.0);
    w.push_back(wi);
    fit.points.push_back(pt);
  }
  const auto used = std::count_if(fit.points.begin(), fit.points.end(), [](const SlopePoint& p) { return p.used; });
  if (used < 3) fail(Errc::sample_starved, "fewer than 3 grid points with enough tail hits");
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < fit.points.size(); ++i) {
    if (!fit.points[i].used) continue;
    const double dx = fit.points[i].log_n - xbar;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * (fit.points[i].log_p - ybar);
  }
  const double slope = sxy / sxx;
  fit.slope = normal_estimate(slope, 1.0 / std::sqrt(sxx), tail.total(), level);
  fit.intercept = ybar - slope * xbar;
  return fit;
}

RankTestResult two_sample_rank_test(const EmpiricalTail& a, const EmpiricalTail& b) {
  if (a.censor_threshold() != b.censor_threshold()) fail(Errc::censoring, "rank test needs a shared censor threshold");
  require_samples(a);
  require_samples(b);
  const std::int64_t ca = a.censored();
  const std::int64_t cb = b.censored();
  const auto& va = a.sorted_values();
  const auto& vb = b.sorted_values();
  const std::size_t na = va.size() - static_cast<std::size_t>(ca);
  const std::size_t nb = vb.size() - static_cast<std::size_t>(cb);

  RankTestResult out;
  if (na > 0 && nb > 0) {
    // Both sides are sorted: walk tie groups of the merged sequence.
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    double next_rank = 1.0;
    while (i < na || j < nb) {
      const std::int64_t v = (j >= nb || (i < na && va[i] <= vb[j])) ? va[i] : vb[j];
      std::size_t ta = 0;
      std::size_t tb = 0;
      while (i < na && va[i] == v) ++i, ++ta;
      while (j < nb && vb[j] == v) ++j, ++tb;
      const auto t = static_cast<double>(ta + tb);
      const double mid = next_rank + (t - 1.0) / 2.0;
      rank_sum_a += static_cast<double>(ta) * mid;
      tie_term += t * t * t - t;
      next_rank += t;
    }
    const auto n1 = static_cast<double>(na);
    const auto n2 = static_cast<double>(nb);
    const double total = n1 + n2;
    const double u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    const double var = n1 * n2 / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    out.statistic_z = var > 0.0 ? (u - n1 * n2 / 2.0) / std::sqrt(var) : 0.0;
    out.p_rank = var > 0.0 ? normal_two_sided(out.statistic_z) : 1.0;
  }
  if (ca + cb > 0) {
    const auto ma = static_cast<double>(va.size());
    const auto mb = static_cast<double>(vb.size());
    const double pooled = static_cast<double>(ca + cb) / (ma + mb);
    const double denom = std::sqrt(pooled * (1.0 - pooled) * (1.0 / ma + 1.0 / mb));
    const double diff = static_cast<double>(ca) / ma - static_cast<double>(cb) / mb;
    out.p_censored = denom > 0.0 ? normal_two_sided(diff / denom) : 1.0;
    const double chi = -2.0 * (std::log(out.p_rank) + std::log(*out.p_censored));
    out.p_value = std::exp(-chi / 2.0) * (1.0 + chi / 2.0);
  } else {
    out.p_value = out.p_rank;
  }
  return out;
}

double ks_uniform_pvalue(std::vector<double> values) {
  if (values.empty()) fail(Errc::sample_starved, "KS test on an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = values[i];
    if (!(u >= 0.0 && u <= 1.0)) fail(Errc::invalid_argument, "KS uniform test needs values in [0,1]");
    d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  if (lam < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lam * lam);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

RatioSummary ratio_convergence(std::span<const std::pair<std::int64_t, std::int64_t>> pairs, double x) {
  if (x == 0.0 || !std::isfinite(x)) fail(Errc::invalid_argument, "ratio needs a finite nonzero level");
  if (pairs.empty()) fail(Errc::sample_starved, "no coupled samples");
  std::vector<double> r;
  r.reserve(pairs.size());
  for (const auto& [n_x, z] : pairs) {
    if (z <= 0) fail(Errc::invalid_argument, "z_count must be >= 1");
    r.push_back(static_cast<double>(n_x) / (x * static_cast<double>(z)));
  }
  return {sample_quantile(r, 0.5), sample_quantile(r, 0.25), sample_quantile(r, 0.75),
          static_cast<std::int64_t>(r.size())};
}

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(Errc::sample_starved, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) fail(Errc::invalid_argument, "quantile level must be in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

EstimateCI bootstrap_mean(std::span<const double> values, int replicates, const RngStream& rng, double level) {
  if (values.empty()) fail(Errc::sample_starved, "bootstrap of an empty sample");
  if (replicates < 2) fail(Errc::invalid_argument, "bootstrap needs at least 2 replicates");
  RngStream s = rng;
  const std::size_t m = values.size();
  std::vector<double> means(static_cast<std::size_t>(replicates));
  std::vector<double> draw(m);
  for (double& mean : means) {
    for (double& d : draw) d = values[std::min(m - 1, static_cast<std::size_t>(s.uniform() * static_cast<double>(m)))];
    mean = pairwise_sum(draw) / static_cast<double>(m);
  }
  std::vector<double> copy(values.begin(), values.end());
  const double mean = pairwise_sum(copy) / static_cast<double>(m);
  return normal_estimate(mean, moments(means).sd, static_cast<std::int64_t>(m), level);
}

}  // namespace bbmlab

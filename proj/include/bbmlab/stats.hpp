#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bbmlab/brw.hpp"
#include "bbmlab/rng.hpp"

namespace bbmlab {

/// Point estimate with standard error and a two-sided interval at `level`.
/// The interval is the normal one unless an estimator says otherwise.
struct EstimateCI {
  double value = 0.0;
  double std_error = 0.0;
  double level = 0.95;
  std::int64_t n_samples = 0;
  double lo = 0.0;
  double hi = 0.0;
};

EstimateCI normal_estimate(double value, double std_error, std::int64_t n_samples, double level = 0.95);

/// Recursive halving sum; the result depends only on the sequence.
double pairwise_sum(std::span<const double> values) noexcept;

/// Mean/variance accumulator made of per-batch partial sums. Merging
/// concatenates partials; estimate() reduces them pairwise in batch-index
/// order, so any merge order gives a bit-identical result.
class MeanAccumulator {
 public:
  struct Partial {
    std::uint64_t batch = 0;
    std::int64_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
  };

  MeanAccumulator() = default;
  static MeanAccumulator from_batch(std::uint64_t batch, std::span<const double> values);

  /// Throws Errc::invalid_argument when both sides hold the same batch index.
  MeanAccumulator& merge(const MeanAccumulator& other);

  std::int64_t count() const noexcept;
  EstimateCI estimate(double level = 0.95) const;
  const std::vector<Partial>& partials() const noexcept { return partials_; }

 private:
  std::vector<Partial> partials_;  // sorted by batch
};

/// Sorted integer sample where values at or above `censor_threshold` mean
/// "at least the threshold". work_capped records never enter; their number is
/// kept in `excluded`.
class EmpiricalTail {
 public:
  EmpiricalTail(std::vector<std::int64_t> values, std::optional<std::int64_t> censor_threshold,
                std::int64_t excluded = 0);

  /// count_capped records are stored at the threshold.
  static EmpiricalTail from_counts(std::span<const CensoredCount> samples, std::optional<std::int64_t> censor_threshold);

  const std::vector<std::int64_t>& sorted_values() const noexcept { return values_; }
  std::optional<std::int64_t> censor_threshold() const noexcept { return threshold_; }
  std::int64_t total() const noexcept { return static_cast<std::int64_t>(values_.size()); }
  std::int64_t excluded() const noexcept { return excluded_; }
  double excluded_fraction() const noexcept;
  std::int64_t censored() const noexcept;

  /// #{value >= n}. Throws Errc::censoring for n above the threshold.
  std::int64_t count_at_least(std::int64_t n) const;

  /// Value at empirical quantile q (lower order statistic). Throws
  /// Errc::censoring if it falls in the censored block.
  std::int64_t quantile(double q) const;

 private:
  std::vector<std::int64_t> values_;
  std::optional<std::int64_t> threshold_;
  std::int64_t excluded_ = 0;
};

/// Exact binomial interval for k successes out of n.
std::pair<double, double> clopper_pearson(std::int64_t k, std::int64_t n, double level = 0.95);

/// n * P(N >= n) with a Clopper-Pearson interval scaled by n.
EstimateCI tail_ratio(const EmpiricalTail& tail, std::int64_t n, double level = 0.95);

/// E[N 1{N <= n}] - log n. Requires n < censor_threshold: a censored record
/// only says N >= threshold, which leaves N 1{N <= threshold} undetermined.
EstimateCI truncated_mean_offset(const EmpiricalTail& tail, std::int64_t n, double level = 0.95);

/// phi(lambda) = log E[e^{-lambda N}] with a delta-method error. Censored
/// records enter as e^{-lambda threshold}; requires lambda * threshold >= 30.
EstimateCI laplace_log_transform(const EmpiricalTail& tail, double lambda, double level = 0.95);

/// (phi(lambda) - lambda log lambda) / lambda, built from laplace_log_transform.
EstimateCI laplace_expansion_check(const EmpiricalTail& tail, double lambda, double level = 0.95);

struct FunctionalEquation {
  EstimateCI lhs;  ///< phi(lambda, x) from direct N_x samples
  EstimateCI rhs;  ///< assembled from phi(lambda, 0) and Z_x samples
  EstimateCI phi0; ///< the phi(lambda, 0) used on the right
};

/// x > 0: rhs = lambda + log E[exp((phi0 - lambda) Z_x)]; x < 0: rhs = log E[exp(phi0 Z_x)].
/// The three inputs must be independent sample sets.
FunctionalEquation functional_equation_check(const EmpiricalTail& n_samples, const EmpiricalTail& n_x_samples,
                                             std::span<const std::int64_t> z_counts, double lambda, double x,
                                             double level = 0.95);

struct SlopePoint {
  std::int64_t n = 0;
  std::int64_t hits = 0;
  double log_n = 0.0;
  double log_p = 0.0;  ///< after the log-log correction
  bool used = false;
};

struct SlopeFit {
  EstimateCI slope;
  double intercept = 0.0;
  std::vector<SlopePoint> points;
};

/// Weighted least squares of log P(N >= n) + log_log_power * log log n against
/// log n. Weights are the inverse delta-method variances hits / (1 - P). Points
/// with fewer than kMinTailHits hits are kept in `points` but unused. Throws
/// Errc::sample_starved with fewer than 3 usable points and Errc::censoring
/// for grid points above the threshold.
SlopeFit loglog_slope(const EmpiricalTail& tail, std::span<const std::int64_t> grid, double log_log_power = 0.0,
                      double level = 0.95);

constexpr std::int64_t kMinTailHits = 50;

struct RankTestResult {
  double p_value = 1.0;
  double p_rank = 1.0;                 ///< Mann-Whitney on uncensored values
  std::optional<double> p_censored;    ///< two-proportion test, absent when nothing is censored
  double statistic_z = 0.0;
};

/// Mann-Whitney U with tie correction on the uncensored parts, a pooled
/// two-proportion z test on the censored fractions, combined by Fisher's
/// method when the second is present. Throws Errc::censoring when the
/// thresholds differ.
RankTestResult two_sample_rank_test(const EmpiricalTail& a, const EmpiricalTail& b);

/// Kolmogorov-Smirnov p-value of the sample against Uniform(0,1), asymptotic
/// series with the Stephens small-sample adjustment.
double ks_uniform_pvalue(std::vector<double> values);

struct RatioSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::int64_t count = 0;
};

/// Quartiles of N_x / (x Z_x) over coupled pairs. Throws Errc::invalid_argument
/// for x == 0 or a pair with z_count <= 0.
RatioSummary ratio_convergence(std::span<const std::pair<std::int64_t, std::int64_t>> pairs, double x);

/// Type-7 sample quantile.
double sample_quantile(std::vector<double> values, double q);

/// Nonparametric bootstrap of the sample mean: reports the sample mean with the
/// bootstrap standard deviation of resampled means as its error.
EstimateCI bootstrap_mean(std::span<const double> values, int replicates, const RngStream& rng, double level = 0.95);

}  // namespace bbmlab

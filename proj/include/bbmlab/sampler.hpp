#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>

#include "bbmlab/rng.hpp"

namespace bbmlab {

/// Binary branching Brownian motion with drift `mu`, diffusion coefficient 2
/// and branching rate 1. The displacement of the embedded random walk has MGF
/// 1/(1 - mu*l - l^2), whose poles are r_plus and -r_minus.
struct ModelParams {
  double mu = 2.0;
  double sigma2 = 2.0;
  double branch_rate = 1.0;
  double r_plus = 0.0;   ///< rate of the right (positive) exponential branch
  double r_minus = 0.0;  ///< rate of the left (negative) exponential branch
  double p = 0.0;        ///< mass of the positive branch

  bool is_boundary() const noexcept { return mu == 2.0; }
};

/// Throws Errc::invalid_argument for mu < 2 (or non-finite mu).
ModelParams make_params(double mu);

/// Two-sided exponential mixture: (1-p) r_minus e^{r_minus x} on x<0 and
/// p r_plus e^{-r_plus x} on x>0.
class DisplacementLaw {
 public:
  explicit DisplacementLaw(const ModelParams& params) noexcept
      : r_plus_(params.r_plus), r_minus_(params.r_minus), p_(params.p) {}

  double pdf(double x) const noexcept;
  double cdf(double x) const noexcept;
  double mean() const noexcept { return p_ / r_plus_ - (1.0 - p_) / r_minus_; }
  double variance() const noexcept;

  /// Inverse CDF for u in (0,1); exact on both branches.
  double quantile(double u) const noexcept {
    const double q = 1.0 - p_;
    if (u < q) return std::log(u / q) / r_minus_;
    return -std::log((1.0 - u) / p_) / r_plus_;
  }

  double sample(RngStream& rng) const noexcept { return quantile(rng.uniform()); }

  double r_plus() const noexcept { return r_plus_; }
  double r_minus() const noexcept { return r_minus_; }
  double p() const noexcept { return p_; }

 private:
  double r_plus_;
  double r_minus_;
  double p_;
};

/// Symmetric Laplace law with rate sqrt(2): the spine step of the
/// many-to-one lemma in the boundary case. Unit variance.
class SpineStepLaw {
 public:
  static constexpr double rate = 1.41421356237309504880;

  double pdf(double x) const noexcept { return 0.5 * rate * std::exp(-rate * std::abs(x)); }
  double cdf(double x) const noexcept {
    return x < 0 ? 0.5 * std::exp(rate * x) : 1.0 - 0.5 * std::exp(-rate * x);
  }
  double quantile(double u) const noexcept {
    return u < 0.5 ? std::log(2.0 * u) / rate : -std::log(2.0 * (1.0 - u)) / rate;
  }
  double sample(RngStream& rng) const noexcept { return quantile(rng.uniform()); }
};

/// Throws Errc::invalid_argument unless params is the boundary case.
SpineStepLaw spine_step_law(const ModelParams& params);

/// P(max of a sigma^2=2 Brownian bridge over `lifetime` reaches `gap` | end
/// displacement `endpoint_shift`). Returns 1 when gap <= max(0, w).
double edge_crossing_prob(double gap, double endpoint_shift, double lifetime);

enum class Direction { up, down };

struct Crossed {};
struct Died {
  double position;
};
using EdgeOutcome = std::variant<Crossed, Died>;

/// One particle lifetime started at `start`. With a barrier, reports whether
/// the path touches it before the particle dies; otherwise reports the death
/// position. Died positions are distributed conditionally on no crossing.
EdgeOutcome sample_edge(double start, std::optional<double> barrier, Direction direction,
                        const ModelParams& params, RngStream& rng);

/// Closed-form marginal P(edge started at distance d from the barrier reaches
/// it) = e^{-r d} with r = r_plus (up) or r_minus (down).
double edge_hit_probability(double distance, Direction direction, const ModelParams& params);

}  // namespace bbmlab

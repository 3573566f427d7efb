#include "bbmlab/sampler.hpp"

#include <algorithm>
#include <string>

#include "bbmlab/error.hpp"

namespace bbmlab {

ModelParams make_params(double mu) {
  if (!std::isfinite(mu) || mu < 2.0)
    fail(Errc::invalid_argument, "drift mu must be >= 2 (N is not a.s. finite below 2), got " + std::to_string(mu));
  ModelParams params;
  params.mu = mu;
  // Roots of l^2 + mu l - 1 = 0.
  const double disc = std::sqrt(mu * mu + 4.0);
  params.r_plus = (disc - mu) / 2.0;
  params.r_minus = (disc + mu) / 2.0;
  params.p = params.r_minus / (params.r_plus + params.r_minus);
  return params;
}

double DisplacementLaw::pdf(double x) const noexcept {
  if (x < 0) return (1.0 - p_) * r_minus_ * std::exp(r_minus_ * x);
  if (x > 0) return p_ * r_plus_ * std::exp(-r_plus_ * x);
  // Both one-sided limits agree; report the left one.
  return (1.0 - p_) * r_minus_;
}

double DisplacementLaw::cdf(double x) const noexcept {
  if (x < 0) return (1.0 - p_) * std::exp(r_minus_ * x);
  return 1.0 - p_ * std::exp(-r_plus_ * x);
}

double DisplacementLaw::variance() const noexcept {
  const double second = 2.0 * p_ / (r_plus_ * r_plus_) + 2.0 * (1.0 - p_) / (r_minus_ * r_minus_);
  const double m = mean();
  return second - m * m;
}

SpineStepLaw spine_step_law(const ModelParams& params) {
  if (!params.is_boundary()) fail(Errc::invalid_argument, "spine step law is defined for the boundary case mu = 2 only");
  return SpineStepLaw{};
}

double edge_crossing_prob(double gap, double endpoint_shift, double lifetime) {
  if (!(lifetime > 0.0)) fail(Errc::invalid_argument, "edge lifetime must be > 0");
  if (gap < 0.0) fail(Errc::invalid_argument, "barrier gap must be >= 0");
  if (gap <= std::max(0.0, endpoint_shift)) return 1.0;
  const double exponent = std::max(0.0, gap * (gap - endpoint_shift) / lifetime);
  return std::exp(-exponent);
}

EdgeOutcome sample_edge(double start, std::optional<double> barrier, Direction direction, const ModelParams& params,
                        RngStream& rng) {
  if (barrier) {
    if (direction == Direction::up && *barrier < start)
      fail(Errc::precondition, "upward edge requires barrier >= start");
    if (direction == Direction::down && *barrier > start)
      fail(Errc::precondition, "downward edge requires barrier <= start");
  }
  const double lifetime = rng.exponential();
  const double shift = params.mu * lifetime + std::sqrt(params.sigma2 * lifetime) * rng.normal();
  if (!barrier) return Died{start + shift};

  // Reflect downward problems onto the upward formula.
  const double gap = direction == Direction::up ? *barrier - start : start - *barrier;
  const double w = direction == Direction::up ? shift : -shift;
  const double hit = edge_crossing_prob(gap, w, lifetime);
  if (hit >= 1.0 || rng.uniform() < hit) return Crossed{};
  return Died{start + shift};
}

double edge_hit_probability(double distance, Direction direction, const ModelParams& params) {
  if (distance < 0.0) fail(Errc::invalid_argument, "distance must be >= 0");
  const double rate = direction == Direction::up ? params.r_plus : params.r_minus;
  return std::exp(-rate * distance);
}

}  // namespace bbmlab

#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "bbmlab/rng.hpp"
#include "bbmlab/sampler.hpp"
#include "bbmlab/stats.hpp"

namespace bbmlab {

struct SpinePath {
  std::vector<double> values;  ///< S_0 .. S_n
  double running_min = 0.0;
  double running_max = 0.0;
};

/// Partial sums of i.i.d. Laplace(sqrt 2) steps from `start`.
SpinePath simulate_spine(int n, double start, RngStream& rng);

/// f = 1{S_n <= upper, min_{k<=n} S_k >= floor}, S_0 included in the minimum.
/// The constant functional (both bounds infinite) is the only admitted f
/// without a finite `upper`.
struct PathEvent {
  double upper = std::numeric_limits<double>::infinity();
  double floor = -std::numeric_limits<double>::infinity();

  bool is_constant() const noexcept { return upper == std::numeric_limits<double>::infinity() && floor == -upper; }
  bool operator()(double s_n, double running_min) const noexcept { return s_n <= upper && running_min >= floor; }
};

struct ManyToOneResult {
  EstimateCI lhs;  ///< 2^n E[f(displacement walk)]
  EstimateCI rhs;  ///< E[e^{S_n} f(spine)]
};

/// Both sides of the many-to-one identity at generation n (1 <= n <= 10).
///
/// The left side sums f over the 2^n generation-n particles. Every fixed
/// ancestral line is a walk with i.i.d. displacement steps, so by linearity
/// the sum has mean 2^n times the mean for one walk; no independence between
/// lines is used. The constant f is evaluated in closed form (the weight e^{S_n}
/// has infinite variance under the Laplace step when f is unbounded above).
/// Throws Errc::invalid_argument for upper > 2 or a non-constant f unbounded above.
ManyToOneResult many_to_one_check(const PathEvent& f, int n, std::int64_t samples, const RngStream& rng,
                                  const ModelParams& params);

enum class BallotKind { local_limit, ballot, ballot_backward, three_factor };

std::string_view to_string(BallotKind kind) noexcept;
BallotKind ballot_kind_from_string(std::string_view text);

struct BallotProbe {
  BallotKind kind = BallotKind::ballot;
  int n = 0;
  double alpha = 0.0;
  double h = 0.0;
  double a = 0.0;
  EstimateCI estimate;
  std::int64_t hits = 0;
  bool starved = false;  ///< fewer than kMinHits hits
  double fitted_constant = 0.0;
};

constexpr std::int64_t kMinHits = 50;

/// Monte Carlo estimate for one probe from walks started at 0.
///   local_limit      sup_z P(S_n in [z, z+1])           (sup over all real z)
///   ballot           P(min S >= -alpha)
///   ballot_backward  P(min S >= -alpha, S_n in [h-alpha, h-alpha+1])
///   three_factor     P(min S >= -alpha, S_n in [a, a+h])
/// fitted_constant divides out the bound's n and parameter dependence:
/// sqrt(n), sqrt(n)/(1+alpha), n/(1+h), n^{3/2}/((1+alpha)(1+a+h+alpha)(1+h)).
BallotProbe ballot_probe(BallotKind kind, int n, double alpha, double h, double a, std::int64_t samples,
                         const RngStream& rng);

/// All probes of one n from a single set of walks.
struct ProbeSpec {
  BallotKind kind;
  double alpha = 0.0;
  double h = 0.0;
  double a = 0.0;
};
std::vector<BallotProbe> ballot_probes(const std::vector<ProbeSpec>& specs, int n, std::int64_t samples,
                                       const RngStream& rng);

struct BoundaryMoments {
  double m0 = 0.0;  ///< 2 E[e^{-V}]
  double m1 = 0.0;  ///< 2 E[V e^{-V}]
  double m2 = 0.0;  ///< 2 E[V^2 e^{-V}]
};

/// Adaptive quadrature on each exponential branch, absolute tolerance 1e-10.
/// Throws Errc::invalid_argument off the boundary case and Errc::internal when
/// the quadrature error estimate exceeds the tolerance.
BoundaryMoments boundary_identities(const ModelParams& params);

}  // namespace bbmlab

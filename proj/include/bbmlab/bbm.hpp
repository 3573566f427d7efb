#pragma once

#include <cstdint>
#include <vector>

#include "bbmlab/brw.hpp"
#include "bbmlab/rng.hpp"
#include "bbmlab/sampler.hpp"

namespace bbmlab {

struct PopulationSnapshot {
  double time_t = 0.0;
  std::vector<double> positions;
};

constexpr std::int64_t kDefaultPopulationCap = 10'000'000;

/// Exact event-driven simulation of the particle positions at time t, from a
/// single particle at 0. Throws Errc::resource_exhausted past `population_cap`.
PopulationSnapshot simulate_population(const ModelParams& params, double t, RngStream& rng,
                                       std::int64_t population_cap = kDefaultPopulationCap);

struct SnapshotFunctionals {
  double derivative = 0.0;  ///< D_t = sum x e^{-x}
  double additive = 0.0;    ///< W_t = sum e^{-x}
  double minimum = 0.0;     ///< M_t
  std::int64_t size = 0;
};

SnapshotFunctionals snapshot_functionals(const PopulationSnapshot& snapshot);

/// Minimum position at time t without materializing the whole population.
///
/// A particle alive at time s at position y is dropped once the expected
/// number of its descendants below `level` at time t, e^{t-s} P(y + mu(t-s) +
/// sqrt(2(t-s)) Z <= level), falls under `prune_eps`. The sum of those
/// expectations is returned as `pruned_mass`; it bounds the probability that
/// pruning changed the answer. Particles draw from their tree labels, so when
/// no particle ends below `level` the level is raised by `level_step` and the
/// same realization is explored again with less pruning.
struct MinimumSample {
  double value = 0.0;
  double level = 0.0;
  double pruned_mass = 0.0;
  std::int64_t work = 0;
  int attempts = 0;
};

MinimumSample simulate_minimum(const ModelParams& params, double t, const RngStream& rng, double prune_eps = 1e-9,
                               double level_step = 3.0);

struct LineConfig {
  double barrier_B = 12.0;  ///< x < 0 only: prune deaths above level_x + barrier_B
  std::int64_t work_cap = 1'000'000'000;
};

/// One realization of the stopping line at level_x: z_count particles hit the
/// level for the first time, births_before_absorption births happen before.
struct LineSample {
  double level_x = 0.0;
  std::int64_t z_count = 0;
  std::int64_t births_before_absorption = 0;
  CensorStatus status = CensorStatus::exact;
  std::int64_t work = 0;
  std::int64_t pruned_count = 0;
  double bias_bound = 0.0;
};

/// Iterates particle lifetimes with sample_edge against the barrier at
/// level_x. Lifetimes are memoryless, so a crossing particle is retired at the
/// barrier and times never need to be tracked.
LineSample sample_line(const ModelParams& params, double level_x, const LineConfig& config, RngStream& rng);

struct ComposedSample {
  CensoredCount count;  ///< N_x assembled from the line and copies of N
  LineSample line;      ///< the line it was assembled from (same realization)
};

/// N_x = (Z_x - 1) 1{x > 0} + sum_{j <= Z_x} N^(j). The line uses `rng`
/// itself; copy j explores tree `rng.split(j)` with the same barrier offset.
/// count_cap and node_cap apply to the assembled total.
ComposedSample sample_N_x_composed(const ModelParams& params, double level_x, const ExploreConfig& config,
                                   const RngStream& rng);

}  // namespace bbmlab

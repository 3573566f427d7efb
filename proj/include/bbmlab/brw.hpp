#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "bbmlab/rng.hpp"
#include "bbmlab/sampler.hpp"

namespace bbmlab {

/// Generation/ancestral-maximum window: counts u with a x^2 <= |u| <= b x^2,
/// V(u) <= x and max_{k<=|u|} V(u_k) <= lambda x, where x is the level.
struct Window {
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
  double lambda = std::numeric_limits<double>::infinity();
};

struct ExploreConfig {
  double level_x = 0.0;
  double barrier_B = 12.0;  ///< prune births above level_x + barrier_B
  std::int64_t node_cap = 1'000'000'000;
  std::int64_t count_cap = 100'000;
  std::int64_t frontier_cap = 8'000'000;  ///< live-frontier memory guard, counts as a work cap
  std::vector<Window> windows;
};

/// Throws Errc::invalid_argument on non-positive barrier or caps.
void validate(const ExploreConfig& config);

enum class CensorStatus : int { exact = 0, count_capped = 1, work_capped = 2 };

std::string_view to_string(CensorStatus status) noexcept;
CensorStatus censor_status_from_string(std::string_view text);

/// One sampled count with its censoring state and pruning diagnostics.
struct CensoredCount {
  std::int64_t value = 0;
  CensorStatus status = CensorStatus::exact;
  std::int64_t pruned_count = 0;
  std::int64_t work = 0;
  double bias_bound = 0.0;
  std::vector<std::int64_t> window_counts;  ///< parallel to ExploreConfig::windows
};

/// Breadth-first exploration of the birth-position random walk rooted at 0.
/// Counts births at or below level_x; pruned births are those above
/// level_x + barrier_B. Every node draws its displacement from its own label,
/// so two calls with the same stream explore identical trees and raising the
/// barrier or either cap only adds nodes.
CensoredCount explore_tree(const ModelParams& params, const ExploreConfig& config, const RngStream& rng);

struct AllTimeMin {
  double value = std::numeric_limits<double>::infinity();
  CensorStatus status = CensorStatus::exact;
  std::int64_t work = 0;
  std::int64_t pruned_count = 0;
};

/// Minimal birth position among explored nodes. Nothing is counted; the
/// barrier still prunes above level_x + barrier_B and the node cap applies.
AllTimeMin sample_alltime_min(const ModelParams& params, const ExploreConfig& config, const RngStream& rng);

/// Upper bound on the expected number of pruned subtrees that would have
/// reached back below the level: pruned_count * e^{-barrier_B}.
double pruning_bias_bound(const CensoredCount& sample, double barrier_B);

}  // namespace bbmlab

#include "bbmlab/brw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bbmlab/error.hpp"
#include "kernels.hpp"

namespace bbmlab {
namespace {

struct Node {
  double position;
  double running_max;
};

// Structure-of-arrays frontier for one generation.
struct Frontier {
  std::vector<double> position;
  std::vector<double> running_max;
  std::vector<std::uint64_t> label;

  std::size_t size() const noexcept { return label.size(); }
  bool empty() const noexcept { return label.empty(); }
  void clear() noexcept {
    position.clear();
    running_max.clear();
    label.clear();
  }
  void push(double pos, double rmax, std::uint64_t lab) {
    position.push_back(pos);
    running_max.push_back(rmax);
    label.push_back(lab);
  }
};

constexpr std::size_t kChunk = 2048;

// Drives the breadth-first walk; `visit` sees each explored node with its
// generation and returns false to stop the exploration early. All nodes of a
// generation are visited before any of them is expanded, so the visiting
// order is plain BFS order.
template <typename Visit>
CensorStatus walk_tree(const ModelParams& params, const ExploreConfig& config, const RngStream& rng,
                       std::int64_t& work, std::int64_t& pruned, Visit&& visit) {
  const kernels::MixtureRates rates{1.0 - params.p, params.p, params.r_minus, params.r_plus};
  const double prune_above = config.level_x + config.barrier_B;

  Frontier frontier;
  Frontier next;
  std::uint64_t labels[2 * kChunk];
  double positions[2 * kChunk];

  {
    const std::uint64_t root_label = rng.tree_root();
    const double origin = 0.0;
    double root_pos = 0.0;
    kernels::child_positions(&origin, &root_label, &root_pos, 1, rates);
    if (root_pos > prune_above) {
      ++pruned;
      return CensorStatus::exact;
    }
    frontier.push(root_pos, root_pos, root_label);
  }

  for (std::int64_t generation = 0; !frontier.empty(); ++generation) {
    const std::size_t n = frontier.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (work + 1 >= config.node_cap) return CensorStatus::work_capped;
      ++work;
      if (!visit(Node{frontier.position[i], frontier.running_max[i]}, generation)) return CensorStatus::count_capped;
    }

    next.clear();
    for (std::size_t begin = 0; begin < n; begin += kChunk) {
      const std::size_t m = std::min(kChunk, n - begin);
      kernels::child_labels(frontier.label.data() + begin, labels, m);
      kernels::child_positions(frontier.position.data() + begin, labels, positions, 2 * m, rates);
      for (std::size_t j = 0; j < 2 * m; ++j) {
        const double pos = positions[j];
        if (pos > prune_above) {
          ++pruned;
          continue;
        }
        next.push(pos, std::max(frontier.running_max[begin + j / 2], pos), labels[j]);
      }
      if (static_cast<std::int64_t>(next.size()) > config.frontier_cap) return CensorStatus::work_capped;
    }
    std::swap(frontier, next);
  }
  return CensorStatus::exact;
}

}  // namespace

void validate(const ExploreConfig& config) {
  if (!(config.barrier_B > 0.0)) fail(Errc::invalid_argument, "barrier_B must be > 0");
  if (config.node_cap < 1) fail(Errc::invalid_argument, "node_cap must be >= 1");
  if (config.count_cap < 1) fail(Errc::invalid_argument, "count_cap must be >= 1");
  if (config.frontier_cap < 1) fail(Errc::invalid_argument, "frontier_cap must be >= 1");
  if (std::isnan(config.level_x)) fail(Errc::invalid_argument, "level_x must be a number");
  for (const Window& w : config.windows) {
    if (!(w.a >= 0.0) || !(w.b >= w.a)) fail(Errc::invalid_argument, "window requires 0 <= a <= b");
  }
}

std::string_view to_string(CensorStatus status) noexcept {
  switch (status) {
    case CensorStatus::exact: return "exact";
    case CensorStatus::count_capped: return "count_capped";
    case CensorStatus::work_capped: return "work_capped";
  }
  return "exact";
}

CensorStatus censor_status_from_string(std::string_view text) {
  if (text == "exact") return CensorStatus::exact;
  if (text == "count_capped") return CensorStatus::count_capped;
  if (text == "work_capped") return CensorStatus::work_capped;
  fail(Errc::invalid_argument, "unknown censor status '" + std::string(text) + "'");
}

CensoredCount explore_tree(const ModelParams& params, const ExploreConfig& config, const RngStream& rng) {
  validate(config);
  CensoredCount out;
  const double x = config.level_x;
  const double x2 = x * x;
  out.window_counts.assign(config.windows.size(), 0);

  std::int64_t count = 0;
  out.status = walk_tree(params, config, rng, out.work, out.pruned_count, [&](const Node& node, std::int64_t gen) {
    if (node.position > x) return true;
    for (std::size_t i = 0; i < config.windows.size(); ++i) {
      const Window& w = config.windows[i];
      const auto g = static_cast<double>(gen);
      if (g >= w.a * x2 && g <= w.b * x2 && node.running_max <= w.lambda * x) ++out.window_counts[i];
    }
    return ++count < config.count_cap;
  });
  out.value = count;
  out.bias_bound = pruning_bias_bound(out, config.barrier_B);
  return out;
}

AllTimeMin sample_alltime_min(const ModelParams& params, const ExploreConfig& config, const RngStream& rng) {
  validate(config);
  AllTimeMin out;
  out.status = walk_tree(params, config, rng, out.work, out.pruned_count, [&](const Node& node, std::int64_t) {
    out.value = std::min(out.value, node.position);
    return true;
  });
  return out;
}

double pruning_bias_bound(const CensoredCount& sample, double barrier_B) {
  return static_cast<double>(sample.pruned_count) * std::exp(-barrier_B);
}

}  // namespace bbmlab

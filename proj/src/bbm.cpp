#include "bbmlab/bbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "bbmlab/error.hpp"

namespace bbmlab {
namespace {

struct Alive {
  double born;
  double position;
};

// E[# descendants at time t below `level`] for a particle at y, tau before t.
double expected_below(double y, double tau, double level, double mu) {
  if (tau <= 0.0) return y <= level ? 1.0 : 0.0;
  const double z = (level - y - mu * tau) / std::sqrt(2.0 * tau);
  return std::exp(tau) * 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace

PopulationSnapshot simulate_population(const ModelParams& params, double t, RngStream& rng,
                                       std::int64_t population_cap) {
  if (!(t >= 0.0) || !std::isfinite(t)) fail(Errc::invalid_argument, "population time must be finite and >= 0");
  if (population_cap < 1) fail(Errc::invalid_argument, "population cap must be >= 1");

  PopulationSnapshot snap;
  snap.time_t = t;
  std::vector<Alive> stack{{0.0, 0.0}};
  while (!stack.empty()) {
    const Alive a = stack.back();
    stack.pop_back();
    const double life = rng.exponential() / params.branch_rate;
    const double tau = std::min(life, t - a.born);
    const double end = a.position + params.mu * tau + std::sqrt(params.sigma2 * tau) * rng.normal();
    if (a.born + life >= t) {
      snap.positions.push_back(end);
      continue;
    }
    if (static_cast<std::int64_t>(snap.positions.size() + stack.size()) + 2 > population_cap) {
      fail(Errc::resource_exhausted, "population cap exceeded at t=" + std::to_string(t));
    }
    stack.push_back({a.born + life, end});
    stack.push_back({a.born + life, end});
  }
  return snap;
}

SnapshotFunctionals snapshot_functionals(const PopulationSnapshot& snapshot) {
  SnapshotFunctionals f;
  f.size = static_cast<std::int64_t>(snapshot.positions.size());
  f.minimum = std::numeric_limits<double>::infinity();
  for (const double x : snapshot.positions) {
    const double w = std::exp(-x);
    f.additive += w;
    f.derivative += x * w;
    f.minimum = std::min(f.minimum, x);
  }
  return f;
}

MinimumSample simulate_minimum(const ModelParams& params, double t, const RngStream& rng, double prune_eps,
                               double level_step) {
  if (!(t >= 0.0) || !std::isfinite(t)) fail(Errc::invalid_argument, "minimum time must be finite and >= 0");
  if (!(prune_eps > 0.0) || !(level_step > 0.0)) fail(Errc::invalid_argument, "prune_eps and level_step must be > 0");

  // Each particle draws from its own tree label, so the realization does not
  // depend on what gets pruned and a retry at a higher level extends the same
  // tree instead of drawing a fresh one.
  struct Labeled {
    double born;
    double position;
    std::uint64_t label;
  };
  MinimumSample out;
  out.level = 1.5 * std::log1p(t) + 2.0;
  for (int attempt = 0;; ++attempt) {
    double best = std::numeric_limits<double>::infinity();
    double pruned_mass = 0.0;
    std::vector<Labeled> stack{{0.0, 0.0, rng.tree_root()}};
    while (!stack.empty()) {
      const Labeled a = stack.back();
      stack.pop_back();
      ++out.work;
      const double mass = expected_below(a.position, t - a.born, out.level, params.mu);
      if (mass < prune_eps) {
        pruned_mass += mass;
        continue;
      }
      const auto [u_life, u_radius] = rng.keyed(a.label);
      const double u_angle = unit_open(rng.keyed(~a.label).first);
      const double life = -std::log(unit_open(u_life)) / params.branch_rate;
      const double z = std::sqrt(-2.0 * std::log(unit_open(u_radius))) * std::cos(2.0 * 3.14159265358979323846 * u_angle);
      const double tau = std::min(life, t - a.born);
      const double end = a.position + params.mu * tau + std::sqrt(params.sigma2 * tau) * z;
      if (a.born + life >= t) {
        best = std::min(best, end);
        continue;
      }
      const auto [left, right] = RngStream::tree_children(a.label);
      stack.push_back({a.born + life, end, left});
      stack.push_back({a.born + life, end, right});
    }
    out.attempts = attempt + 1;
    if (best <= out.level) {
      out.value = best;
      out.pruned_mass = pruned_mass;
      return out;
    }
    out.level += level_step;
  }
}

LineSample sample_line(const ModelParams& params, double level_x, const LineConfig& config, RngStream& rng) {
  if (!std::isfinite(level_x)) fail(Errc::invalid_argument, "line level must be finite");
  if (!(config.barrier_B > 0.0)) fail(Errc::invalid_argument, "barrier_B must be > 0");
  if (config.work_cap < 1) fail(Errc::invalid_argument, "work_cap must be >= 1");

  LineSample out;
  out.level_x = level_x;
  const Direction dir = level_x >= 0.0 ? Direction::up : Direction::down;
  const double prune_above = level_x + config.barrier_B;
  std::vector<double> starts{0.0};
  while (!starts.empty()) {
    if (out.work >= config.work_cap) {
      out.status = CensorStatus::work_capped;
      break;
    }
    const double start = starts.back();
    starts.pop_back();
    ++out.work;
    const EdgeOutcome edge = sample_edge(start, level_x, dir, params, rng);
    if (std::holds_alternative<Crossed>(edge)) {
      ++out.z_count;
      continue;
    }
    const double pos = std::get<Died>(edge).position;
    if (dir == Direction::down && pos > prune_above) {
      ++out.pruned_count;
      continue;
    }
    ++out.births_before_absorption;
    starts.push_back(pos);
    starts.push_back(pos);
  }
  out.bias_bound = static_cast<double>(out.pruned_count) * std::exp(-config.barrier_B);
  return out;
}

ComposedSample sample_N_x_composed(const ModelParams& params, double level_x, const ExploreConfig& config,
                                   const RngStream& rng) {
  validate(config);
  ComposedSample out;
  RngStream line_rng = rng;
  out.line = sample_line(params, level_x, LineConfig{config.barrier_B, config.node_cap}, line_rng);

  CensoredCount& c = out.count;
  c.work = out.line.work;
  c.pruned_count = out.line.pruned_count;
  c.status = out.line.status;
  std::int64_t total = level_x > 0.0 ? out.line.z_count - 1 : 0;
  if (c.status == CensorStatus::exact && total >= config.count_cap) {
    total = config.count_cap;
    c.status = CensorStatus::count_capped;
  }

  ExploreConfig copy_config = config;
  copy_config.level_x = 0.0;
  copy_config.windows.clear();
  for (std::int64_t j = 0; j < out.line.z_count && c.status == CensorStatus::exact; ++j) {
    copy_config.count_cap = config.count_cap - total;
    copy_config.node_cap = config.node_cap - c.work;
    if (copy_config.node_cap < 1) {
      c.status = CensorStatus::work_capped;
      break;
    }
    const CensoredCount part = explore_tree(params, copy_config, rng.split(static_cast<std::uint64_t>(j)));
    total += part.value;
    c.work += part.work;
    c.pruned_count += part.pruned_count;
    c.status = part.status;
  }
  c.value = total;
  c.bias_bound = pruning_bias_bound(c, config.barrier_B);
  return out;
}

}  // namespace bbmlab

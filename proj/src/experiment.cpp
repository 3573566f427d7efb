#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "battery.hpp"
#include "bbmlab/bbm.hpp"
#include "bbmlab/brw.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/experiment.hpp"
#include "bbmlab/parallel.hpp"
#include "bbmlab/spine.hpp"
#include "bbmlab/stats.hpp"
#include "io.hpp"

namespace bbmlab {
namespace {

namespace fs = std::filesystem;

struct Run {
  const Json& config;
  Json summary;
  RunOutcome outcome;
  fs::path dir;

  Run(std::string_view command, const Json& cfg) : config(cfg), dir(cfg.at("out_dir").get<std::string>()) {
    summary = {{"schema", "bbmlab-summary v1"},
               {"command", command},
               {"version", BBMLAB_VERSION},
               {"config", experiment_part(cfg)},
               {"config_fingerprint", config_fingerprint(cfg)},
               {"inputs", Json::array()},
               {"estimates", Json::array()},
               {"diagnostics", Json::object()},
               {"skipped", Json::array()}};
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(Errc::io, "cannot create output directory " + dir.string() + ": " + ec.message());
  }

  std::int64_t i64(const char* key) const { return config.at(key).get<std::int64_t>(); }
  double f64(const char* key) const { return config.at(key).get<double>(); }
  int workers() const { return static_cast<int>(i64("workers")); }
  RngStream base() const { return RngStream(config.at("seed").get<std::uint64_t>(), config.at("stream").get<std::uint64_t>()); }

  void add(const std::string& name, const EstimateCI& e) { summary["estimates"].push_back(io::estimate_json(name, e)); }

  // Runs `fn`, recording a skip instead of failing when a statistic is not
  // defined for this sample (censoring, starvation).
  template <typename Fn>
  void maybe(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() != Errc::censoring && e.code() != Errc::sample_starved) throw;
      summary["skipped"].push_back({{"name", name}, {"reason", e.what()}});
    }
  }

  void csv(const std::string& file, const io::CsvWriter& w) {
    io::write_file(dir / file, w.text());
    summary["inputs"].push_back({{"file", file}, {"git_blob_sha1", git_blob_sha1(w.text())}});
    outcome.files.push_back((dir / file).string());
  }

  RunOutcome finish(bool accepted, std::string message) {
    summary["accepted"] = accepted;
    outcome.exit_code = accepted ? 0 : 1;
    outcome.message = std::move(message);
    io::write_file(dir / "summary.json", summary.dump(2) + "\n");
    outcome.files.push_back((dir / "summary.json").string());
    outcome.summary = summary;
    return outcome;
  }
};

ExploreConfig explore_config(const Run& r, double level_x) {
  ExploreConfig c;
  c.level_x = level_x;
  c.barrier_B = r.f64("barrier_b");
  c.count_cap = r.i64("count_cap");
  c.node_cap = r.i64("node_cap");
  c.frontier_cap = r.i64("frontier_cap");
  if (r.config.contains("windows")) {
    for (const Json& w : r.config["windows"]) {
      Window win;
      win.a = w.value("a", 0.0);
      win.b = w.value("b", INFINITY);
      win.lambda = w.value("lambda", INFINITY);
      c.windows.push_back(win);
    }
  }
  validate(c);
  return c;
}

const char* status_text(CensorStatus s) { return to_string(s).data(); }

// Threshold statistics shared by every command that samples a count.
void count_statistics(Run& r, const std::vector<CensoredCount>& samples, const std::string& prefix) {
  const std::int64_t cap = r.i64("count_cap");
  const EmpiricalTail tail = EmpiricalTail::from_counts(samples, cap);
  for (const Json& jn : r.config["n_grid"]) {
    const auto n = jn.get<std::int64_t>();
    r.maybe(prefix + "tail_ratio@" + std::to_string(n), [&] { r.add(prefix + "tail_ratio@" + std::to_string(n), tail_ratio(tail, n)); });
  }
  r.maybe(prefix + "p_zero", [&] {
    const EstimateCI t1 = tail_ratio(tail, 1);
    r.add(prefix + "p_zero", {1.0 - t1.value, t1.std_error, t1.level, t1.n_samples, 1.0 - t1.hi, 1.0 - t1.lo});
  });
  for (const Json& jn : r.config["truncation_grid"]) {
    const auto n = jn.get<std::int64_t>();
    const std::string name = prefix + "truncated_mean_offset@" + std::to_string(n);
    r.maybe(name, [&] { r.add(name, truncated_mean_offset(tail, n)); });
  }
  for (const Json& jl : r.config["lambda_grid"]) {
    const double lambda = jl.get<double>();
    const std::string name = prefix + "laplace_coefficient@" + io::num(lambda);
    r.maybe(name, [&] { r.add(name, laplace_expansion_check(tail, lambda)); });
  }
  r.maybe(prefix + "quantile@0.999", [&] {
    const double q = static_cast<double>(tail.quantile(0.999));
    r.add(prefix + "quantile@0.999", normal_estimate(q, 0.0, tail.total()));
  });

  double bias = 0.0;
  double work = 0.0;
  std::int64_t capped = 0;
  for (const CensoredCount& c : samples) {
    bias += c.bias_bound;
    work += static_cast<double>(c.work);
    capped += c.status == CensorStatus::count_capped;
  }
  const auto m = static_cast<double>(samples.size());
  Json& d = r.summary["diagnostics"];
  d["samples"] = samples.size();
  d["count_capped"] = capped;
  d["work_capped"] = tail.excluded();
  d["excluded_fraction"] = tail.excluded_fraction();
  d["mean_bias_bound"] = bias / m;
  d["mean_work"] = work / m;
}

RunOutcome finish_counts(Run& r, const std::vector<CensoredCount>& samples) {
  const double excluded = r.summary["diagnostics"]["excluded_fraction"].get<double>();
  const double limit = r.f64("max_excluded_fraction");
  if (excluded >= limit) {
    return r.finish(false, "work_capped fraction " + io::num(excluded) + " is not below " + io::num(limit));
  }
  return r.finish(true, std::to_string(samples.size()) + " samples");
}

RunOutcome run_sim_n(const Json& cfg, double level_x, bool with_windows) {
  Run r(with_windows ? "sim-nx" : "sim-n", cfg);
  const ModelParams params = make_params(r.f64("mu"));
  const ExploreConfig ec = explore_config(r, level_x);
  const RngStream base = r.base();
  const auto samples = parallel_map<CensoredCount>(r.i64("samples"), r.workers(), r.i64("batch_size"),
                                                   [&](std::int64_t i) { return explore_tree(params, ec, base.split(i)); });

  std::string columns = "sample_id,value,status,pruned_count,work,bias_bound";
  for (std::size_t k = 0; k < ec.windows.size(); ++k) columns += ",window_" + std::to_string(k);
  io::CsvWriter w(with_windows ? "nx_samples" : "n_samples", cfg, columns);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const CensoredCount& c = samples[i];
    std::string line = std::to_string(i) + "," + io::num(c.value) + "," + status_text(c.status) + "," +
                       io::num(c.pruned_count) + "," + io::num(c.work) + "," + io::num(c.bias_bound);
    for (const std::int64_t wc : c.window_counts) line += "," + io::num(wc);
    w.row(line);
  }
  r.csv(with_windows ? "nx_samples.csv" : "n_samples.csv", w);
  count_statistics(r, samples, "");

  // Share of the (uncensored) count that falls inside each window.
  for (std::size_t k = 0; k < ec.windows.size(); ++k) {
    double inside = 0.0;
    double all = 0.0;
    for (const CensoredCount& c : samples) {
      if (c.status != CensorStatus::exact) continue;
      inside += static_cast<double>(c.window_counts[k]);
      all += static_cast<double>(c.value);
    }
    r.summary["diagnostics"]["window_share_" + std::to_string(k)] = all > 0 ? io::jnum(inside / all) : Json(nullptr);
  }
  r.summary["diagnostics"]["level_x"] = level_x;
  return finish_counts(r, samples);
}

RunOutcome run_sim_composed(const Json& cfg) {
  Run r("sim-composed", cfg);
  const ModelParams params = make_params(r.f64("mu"));
  const double x = r.f64("x");
  const ExploreConfig ec = explore_config(r, x);
  const RngStream base = r.base();
  const auto composed = parallel_map<ComposedSample>(
      r.i64("samples"), r.workers(), r.i64("batch_size"),
      [&](std::int64_t i) { return sample_N_x_composed(params, x, ec, base.split(i)); });

  io::CsvWriter w("composed_samples", cfg, "sample_id,value,status,pruned_count,work,bias_bound,z_count,births");
  std::vector<CensoredCount> counts;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::size_t i = 0; i < composed.size(); ++i) {
    const CensoredCount& c = composed[i].count;
    w.row(static_cast<std::int64_t>(i), c.value, status_text(c.status), c.pruned_count, c.work, c.bias_bound,
          composed[i].line.z_count, composed[i].line.births_before_absorption);
    counts.push_back(c);
    if (c.status == CensorStatus::exact) pairs.emplace_back(c.value, composed[i].line.z_count);
  }
  r.csv("composed_samples.csv", w);
  count_statistics(r, counts, "");
  if (x != 0.0) {
    r.maybe("ratio", [&] {
      const RatioSummary s = ratio_convergence(pairs, x);
      r.summary["diagnostics"]["ratio"] = {
          {"median", s.median}, {"q1", s.q1}, {"q3", s.q3}, {"count", s.count}, {"x", x}};
    });
  }
  r.summary["diagnostics"]["level_x"] = x;
  return finish_counts(r, counts);
}

RunOutcome run_sim_line(const Json& cfg) {
  Run r("sim-line", cfg);
  const ModelParams params = make_params(r.f64("mu"));
  const double x = r.f64("x");
  const LineConfig lc{r.f64("barrier_b"), r.i64("work_cap")};
  const RngStream base = r.base();
  const auto lines = parallel_map<LineSample>(r.i64("samples"), r.workers(), r.i64("batch_size"), [&](std::int64_t i) {
    RngStream s = base.split(i);
    return sample_line(params, x, lc, s);
  });

  io::CsvWriter w("line_samples", cfg, "sample_id,x,z_count,births,status");
  std::vector<double> normed;
  std::vector<std::int64_t> births;
  std::int64_t excluded = 0;
  std::int64_t invariant_violations = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const LineSample& l = lines[i];
    w.row(static_cast<std::int64_t>(i), x, l.z_count, l.births_before_absorption, status_text(l.status));
    if (l.status != CensorStatus::exact) {
      ++excluded;
      continue;
    }
    if (x > 0.0 && l.z_count != l.births_before_absorption + 1) ++invariant_violations;
    normed.push_back(x * std::exp(-x) * static_cast<double>(l.z_count));
    births.push_back(l.births_before_absorption);
  }
  r.csv("line_samples.csv", w);

  const EmpiricalTail tail(births, std::nullopt, excluded);
  r.maybe("normed_z_mean", [&] { r.add("normed_z_mean", MeanAccumulator::from_batch(0, normed).estimate()); });
  std::vector<std::int64_t> grid;
  for (const Json& g : r.config["slope_grid"]) grid.push_back(g.get<std::int64_t>());
  r.maybe("births_tail_slope", [&] {
    const SlopeFit fit = loglog_slope(tail, grid, r.f64("log_log_power"));
    r.add("births_tail_slope", fit.slope);
    Json pts = Json::array();
    for (const SlopePoint& p : fit.points) pts.push_back({{"n", p.n}, {"hits", p.hits}, {"used", p.used}});
    r.summary["diagnostics"]["slope_points"] = pts;
  });
  r.maybe("births_tail_slope_raw", [&] { r.add("births_tail_slope_raw", loglog_slope(tail, grid, 0.0).slope); });
  Json& d = r.summary["diagnostics"];
  d["samples"] = lines.size();
  d["work_capped"] = excluded;
  d["excluded_fraction"] = tail.excluded_fraction();
  d["invariant_violations"] = invariant_violations;
  d["level_x"] = x;
  const double limit = r.f64("max_excluded_fraction");
  if (tail.excluded_fraction() >= limit) return r.finish(false, "work_capped fraction above limit");
  if (invariant_violations > 0) return r.finish(false, "z_count = births + 1 violated");
  return r.finish(true, std::to_string(lines.size()) + " line samples");
}

RunOutcome run_sim_pop(const Json& cfg) {
  Run r("sim-pop", cfg);
  const ModelParams params = make_params(r.f64("mu"));
  const std::int64_t cap = r.i64("population_cap");
  const RngStream base = r.base();
  io::CsvWriter w("pop_functionals", cfg, "t,D_t,W_t,M_t,pop_size");
  std::uint64_t t_index = 0;
  for (const Json& jt : r.config["t_grid"]) {
    const double t = jt.get<double>();
    const RngStream tb = base.split(t_index++);
    const auto f = parallel_map<SnapshotFunctionals>(r.i64("samples"), r.workers(), r.i64("batch_size"),
                                                     [&](std::int64_t i) {
                                                       RngStream s = tb.split(i);
                                                       return snapshot_functionals(simulate_population(params, t, s, cap));
                                                     });
    std::vector<double> d;
    std::vector<double> wv;
    std::vector<double> mins;
    std::vector<double> sizes;
    for (const SnapshotFunctionals& s : f) {
      w.row(t, s.derivative, s.additive, s.minimum, s.size);
      d.push_back(s.derivative);
      wv.push_back(s.additive);
      mins.push_back(s.minimum);
      sizes.push_back(static_cast<double>(s.size));
    }
    const int reps = static_cast<int>(r.i64("bootstrap_replicates"));
    const std::string tag = "@" + io::num(t);
    r.add("D_t_mean" + tag, bootstrap_mean(d, reps, tb.split(~0ull)));
    r.add("W_t_mean" + tag, bootstrap_mean(wv, reps, tb.split(~1ull)));
    r.add("pop_size_mean" + tag, MeanAccumulator::from_batch(0, sizes).estimate());
    r.add("M_t_median" + tag, normal_estimate(sample_quantile(mins, 0.5), 0.0, static_cast<std::int64_t>(mins.size())));
  }
  r.csv("pop_functionals.csv", w);
  return r.finish(true, "populations simulated");
}

RunOutcome run_probe_spine(const Json& cfg) {
  Run r("probe-spine", cfg);
  const ModelParams params = make_params(r.f64("mu"));
  const std::int64_t m = r.i64("samples");
  const RngStream base = r.base();
  io::CsvWriter w("probes", cfg, "kind,n,alpha,h,a,estimate,stderr,hits");

  Json mto = Json::array();
  const auto battery = many_to_one_battery();
  const auto ns = r.config["mto_n_grid"].get<std::vector<int>>();
  for (std::size_t k = 0; k < battery.size(); ++k) {
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const NamedEvent& ev = battery[k];
      const ManyToOneResult res = many_to_one_check(ev.event, ns[j], m, base.split(k * 64 + j), params);
      const double se = std::hypot(res.lhs.std_error, res.rhs.std_error);
      const double z = se > 0 ? (res.lhs.value - res.rhs.value) / se : 0.0;
      w.row("many_to_one_lhs", ns[j], -ev.event.floor, 0.0, ev.event.upper, res.lhs.value, res.lhs.std_error, m);
      w.row("many_to_one_rhs", ns[j], -ev.event.floor, 0.0, ev.event.upper, res.rhs.value, res.rhs.std_error, m);
      mto.push_back({{"event", ev.name}, {"n", ns[j]}, {"lhs", res.lhs.value}, {"rhs", res.rhs.value}, {"z", z}});
    }
  }

  Json probes = Json::array();
  const auto grid = ballot_grid();
  const auto bns = r.config["ballot_n_grid"].get<std::vector<int>>();
  bool starved = false;
  for (std::size_t j = 0; j < bns.size(); ++j) {
    for (const BallotProbe& p : ballot_probes(grid, bns[j], m, base.split(1'000'000 + j))) {
      w.row(to_string(p.kind), p.n, p.alpha, p.h, p.a, p.estimate.value, p.estimate.std_error, p.hits);
      probes.push_back({{"kind", to_string(p.kind)}, {"n", p.n}, {"alpha", p.alpha}, {"h", p.h}, {"a", p.a},
                        {"fitted_constant", p.fitted_constant}, {"hits", p.hits}, {"starved", p.starved}});
      starved = starved || p.starved;
    }
  }
  r.csv("probes.csv", w);
  r.summary["diagnostics"]["many_to_one"] = mto;
  r.summary["diagnostics"]["ballot"] = probes;
  r.summary["diagnostics"]["starved_probes"] = starved;
  return r.finish(true, "spine probes done");
}

}  // namespace

RunOutcome run_command(std::string_view command, const Json& config) {
  if (command == "sim-n") return run_sim_n(config, 0.0, false);
  if (command == "sim-nx") return run_sim_n(config, config.at("x").get<double>(), true);
  if (command == "sim-composed") return run_sim_composed(config);
  if (command == "sim-line") return run_sim_line(config);
  if (command == "sim-pop") return run_sim_pop(config);
  if (command == "probe-spine") return run_probe_spine(config);
  fail(Errc::invalid_argument, "unknown command '" + std::string(command) + "'");
}

}  // namespace bbmlab

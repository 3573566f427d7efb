// bbmlab command-line front end. Talks to the library only through bbmlab.h.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bbmlab.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

int report_error(bbmlab_status s, const std::string& where) {
  std::cerr << "bbmlab: " << where << ": " << bbmlab_status_string(s) << ": " << bbmlab_last_error() << "\n";
  return s == BBMLAB_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFail;
}

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

// Scalar flags; a flag is offered only when its key exists for the command.
const Flag kFlags[] = {
    {"--mu", "mu", "drift"},
    {"--x", "x", "level x"},
    {"--barrier", "barrier_b", "pruning barrier B"},
    {"--count-cap", "count_cap", "censoring cap on the count"},
    {"--node-cap", "node_cap", "node budget per sample"},
    {"--frontier-cap", "frontier_cap", "frontier size cap"},
    {"--work-cap", "work_cap", "edge budget per line sample"},
    {"--population-cap", "population_cap", "particle cap per population"},
    {"--bootstrap", "bootstrap_replicates", "bootstrap replicates"},
    {"--log-log-power", "log_log_power", "power of the log log correction in the slope fit"},
    {"--max-excluded", "max_excluded_fraction", "largest tolerated fraction of work-capped samples"},
    {"--samples", "samples", "number of samples"},
    {"--seed", "seed", "seed (default from BBMLAB_SEED, else 42)"},
    {"--stream", "stream", "stream id"},
    {"--workers", "workers", "worker threads"},
    {"--batch-size", "batch_size", "samples per batch"},
    {"--out", "out_dir", "output directory"},
};

struct RunCommand {
  std::string name;
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> values;  // key -> raw flag text
  std::vector<std::string> sets;              // key=json
};

Json default_json(const std::string& command) {
  bbmlab_config* c = nullptr;
  if (bbmlab_config_create(command.c_str(), &c) != BBMLAB_OK) return Json::object();
  const char* text = nullptr;
  Json out = Json::object();
  if (bbmlab_config_json(c, &text) == BBMLAB_OK) out = Json::parse(text);
  bbmlab_config_destroy(c);
  return out;
}

std::string as_json_literal(const Json& def, const std::string& raw) {
  if (def.is_string()) return Json(raw).dump();
  return raw;
}

int run(const RunCommand& rc) {
  bbmlab_config* cfg = nullptr;
  bbmlab_status s = bbmlab_config_create(rc.name.c_str(), &cfg);
  if (s != BBMLAB_OK) return report_error(s, rc.name);
  std::unique_ptr<bbmlab_config, decltype(&bbmlab_config_destroy)> guard(cfg, &bbmlab_config_destroy);
  if (!rc.config_file.empty()) {
    s = bbmlab_config_load_toml(cfg, rc.config_file.c_str());
    if (s != BBMLAB_OK) return report_error(s, rc.config_file);
  }
  const Json defaults = default_json(rc.name);
  for (const auto& [key, raw] : rc.values) {
    s = bbmlab_config_set(cfg, key.c_str(), as_json_literal(defaults[key], raw).c_str());
    if (s != BBMLAB_OK) return report_error(s, "--" + key);
  }
  for (const std::string& kv : rc.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "bbmlab: --set expects key=json, got '" << kv << "'\n";
      return kExitUsage;
    }
    const std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    if (defaults.contains(key) && defaults[key].is_string() && (value.empty() || value.front() != '"')) {
      value = Json(value).dump();
    }
    s = bbmlab_config_set(cfg, key.c_str(), value.c_str());
    if (s != BBMLAB_OK) return report_error(s, "--set " + key);
  }
  bbmlab_result* res = nullptr;
  s = bbmlab_run(cfg, &res);
  if (s != BBMLAB_OK) return report_error(s, rc.name);
  const int code = bbmlab_result_exit_code(res);
  std::cout << bbmlab_result_message(res) << "\n";
  bbmlab_result_destroy(res);
  return code;
}

void print_criterion(const char* text, void*) {
  const Json r = Json::parse(text, nullptr, false);
  if (r.is_discarded()) return;
  std::printf("criterion %2d %-28s %s  (%.1fs)  %s\n", r.value("criterion", 0), r.value("name", "").c_str(),
              r.value("passed", false) ? "PASS" : "FAIL", r.value("seconds", 0.0), r.value("detail", "").c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for branching Brownian motion and branching random walks"};
  app.set_version_flag("--version", std::string(bbmlab_version()));
  app.require_subcommand(1);

  const char* commands[] = {"sim-n", "sim-nx", "sim-composed", "sim-line", "sim-pop", "probe-spine"};
  const char* blurbs[] = {"sample N = N_0 by tree exploration",
                          "sample N_x by tree exploration, with optional windows",
                          "sample N_x through the stopping-line composition",
                          "sample the stopping line Z_x and its birth counts",
                          "simulate populations and the derivative, additive and minimum functionals",
                          "many-to-one and ballot probes on the spine walk"};
  std::vector<RunCommand> runs(std::size(commands));
  for (std::size_t i = 0; i < runs.size(); ++i) {
    RunCommand& rc = runs[i];
    rc.name = commands[i];
    rc.app = app.add_subcommand(rc.name, blurbs[i]);
    rc.app->add_option("--config", rc.config_file, "TOML config; flags win over file values")->check(CLI::ExistingFile);
    const Json defaults = default_json(rc.name);
    for (const Flag& f : kFlags) {
      if (!defaults.contains(f.key)) continue;
      rc.app->add_option_function<std::string>(
          f.name, [&rc, key = std::string(f.key)](const std::string& v) { rc.values[key] = v; }, f.help);
    }
    rc.app->add_option("--set", rc.sets, "override any key with a JSON value, e.g. n_grid=[1,10,100]");
  }

  auto* verify = app.add_subcommand("verify", "run an acceptance suite and print one line per criterion");
  std::string suite = "quick";
  int workers = 1;
  std::optional<std::uint64_t> seed;
  double scale = 1.0;
  std::vector<int> only;
  std::string json_out;
  std::string scratch;
  verify->add_option("suite", suite, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "base seed");
  verify->add_option("--scale", scale, "sample-size multiplier; only 1 counts as acceptance")->check(CLI::PositiveNumber);
  verify->add_option("--only", only, "criterion ids to run")->delimiter(',');
  verify->add_option("--json", json_out, "write the machine-readable results here");
  verify->add_option("--scratch", scratch, "scratch directory for runner-based checks");

  auto* report = app.add_subcommand("report", "build report.md and plot-ready CSV series from run outputs");
  std::string in_dir;
  std::string out_dir = ".";
  report->add_option("--in", in_dir, "directory searched recursively for summary.json")->required();
  report->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  for (const RunCommand& rc : runs) {
    if (rc.app->parsed()) return run(rc);
  }

  if (verify->parsed()) {
    Json opt = {{"workers", workers}, {"scale", scale}};
    if (seed) opt["seed"] = *seed;
    if (!only.empty()) opt["only"] = only;
    if (!scratch.empty()) opt["scratch_dir"] = scratch;
    bbmlab_result* res = nullptr;
    const bbmlab_status s = bbmlab_verify(suite.c_str(), opt.dump().c_str(), print_criterion, nullptr, &res);
    if (s != BBMLAB_OK) return report_error(s, "verify");
    const int code = bbmlab_result_exit_code(res);
    if (!json_out.empty()) {
      std::ofstream f(json_out, std::ios::binary);
      f << bbmlab_result_json(res) << "\n";
      if (!f) {
        std::cerr << "bbmlab: cannot write " << json_out << "\n";
        bbmlab_result_destroy(res);
        return kExitFail;
      }
    }
    std::printf("%s\n", bbmlab_result_message(res));
    bbmlab_result_destroy(res);
    return code;
  }

  if (report->parsed()) {
    const bbmlab_status s = bbmlab_report(in_dir.c_str(), out_dir.c_str());
    if (s != BBMLAB_OK) return report_error(s, "report");
    std::cout << "wrote report.md to " << out_dir << "\n";
    return 0;
  }
  return kExitUsage;
}

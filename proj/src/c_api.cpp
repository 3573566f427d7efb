#include "bbmlab.h"

#include <exception>
#include <new>
#include <string>

#include "bbmlab/brw.hpp"
#include "bbmlab/error.hpp"
#include "bbmlab/experiment.hpp"
#include "bbmlab/spine.hpp"
#include "bbmlab/verify.hpp"

struct bbmlab_config {
  std::string command;
  bbmlab::Json file_values = bbmlab::Json::object();
  bbmlab::Json flag_values = bbmlab::Json::object();
  std::string resolved;
};

struct bbmlab_result {
  int exit_code = 0;
  std::string message;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

bbmlab_status to_status(bbmlab::Errc code) { return static_cast<bbmlab_status>(static_cast<int>(code)); }

template <typename Fn>
bbmlab_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return BBMLAB_OK;
  } catch (const bbmlab::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const bbmlab::Json::exception& e) {
    g_last_error = e.what();
    return BBMLAB_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BBMLAB_ERR_RESOURCE_EXHAUSTED;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BBMLAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return BBMLAB_ERR_INTERNAL;
  }
}

bbmlab_status null_pointer(const char* what) {
  g_last_error = std::string(what) + " is NULL";
  return BBMLAB_ERR_NULL_POINTER;
}

}  // namespace

extern "C" {

const char* bbmlab_version(void) { return BBMLAB_VERSION; }

const char* bbmlab_status_string(bbmlab_status status) {
  switch (status) {
    case BBMLAB_OK: return "ok";
    case BBMLAB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BBMLAB_ERR_PRECONDITION: return "precondition violated";
    case BBMLAB_ERR_CENSORING: return "censoring";
    case BBMLAB_ERR_SAMPLE_STARVED: return "sample starved";
    case BBMLAB_ERR_RESOURCE_EXHAUSTED: return "resource exhausted";
    case BBMLAB_ERR_IO: return "i/o error";
    case BBMLAB_ERR_INTERNAL: return "internal error";
    case BBMLAB_ERR_NULL_POINTER: return "null pointer";
  }
  return "unknown status";
}

const char* bbmlab_last_error(void) { return g_last_error.c_str(); }

bbmlab_status bbmlab_config_create(const char* command, bbmlab_config** out) {
  if (command == nullptr) return null_pointer("command");
  if (out == nullptr) return null_pointer("out");
  *out = nullptr;
  return guarded([&] {
    bbmlab::default_config(command);  // rejects unknown commands
    auto* c = new bbmlab_config;
    c->command = command;
    *out = c;
  });
}

void bbmlab_config_destroy(bbmlab_config* config) { delete config; }

bbmlab_status bbmlab_config_load_toml(bbmlab_config* config, const char* path) {
  if (config == nullptr) return null_pointer("config");
  if (path == nullptr) return null_pointer("path");
  return guarded([&] {
    bbmlab::Json values = bbmlab::load_toml_config(path, config->command);
    bbmlab::resolve_config(config->command, values, config->flag_values);
    config->file_values = std::move(values);
  });
}

bbmlab_status bbmlab_config_set(bbmlab_config* config, const char* key, const char* json_value) {
  if (config == nullptr) return null_pointer("config");
  if (key == nullptr) return null_pointer("key");
  if (json_value == nullptr) return null_pointer("json_value");
  return guarded([&] {
    bbmlab::Json flags = config->flag_values;
    flags[key] = bbmlab::Json::parse(json_value);
    bbmlab::resolve_config(config->command, config->file_values, flags);
    config->flag_values = std::move(flags);
  });
}

bbmlab_status bbmlab_config_json(bbmlab_config* config, const char** out_json) {
  if (config == nullptr) return null_pointer("config");
  if (out_json == nullptr) return null_pointer("out_json");
  return guarded([&] {
    config->resolved = bbmlab::resolve_config(config->command, config->file_values, config->flag_values).dump();
    *out_json = config->resolved.c_str();
  });
}

bbmlab_status bbmlab_run(const bbmlab_config* config, bbmlab_result** out) {
  if (config == nullptr) return null_pointer("config");
  if (out == nullptr) return null_pointer("out");
  *out = nullptr;
  return guarded([&] {
    const bbmlab::Json resolved = bbmlab::resolve_config(config->command, config->file_values, config->flag_values);
    const bbmlab::RunOutcome run = bbmlab::run_command(config->command, resolved);
    auto* r = new bbmlab_result;
    r->exit_code = run.exit_code;
    r->message = run.message;
    r->json = run.summary.dump(2);
    *out = r;
  });
}

bbmlab_status bbmlab_verify(const char* suite, const char* options_json, bbmlab_criterion_callback callback,
                            void* user_data, bbmlab_result** out) {
  if (suite == nullptr) return null_pointer("suite");
  if (out == nullptr) return null_pointer("out");
  *out = nullptr;
  return guarded([&] {
    bbmlab::VerifyOptions opt;
    if (options_json != nullptr && *options_json != '\0') {
      const bbmlab::Json o = bbmlab::Json::parse(options_json);
      for (const auto& [k, v] : o.items()) {
        if (k == "workers") opt.workers = v.get<int>();
        else if (k == "seed") opt.seed = v.get<std::uint64_t>();
        else if (k == "scale") opt.scale = v.get<double>();
        else if (k == "only") opt.only = v.get<std::vector<int>>();
        else if (k == "scratch_dir") opt.scratch_dir = v.get<std::string>();
        else bbmlab::fail(bbmlab::Errc::invalid_argument, "unknown verify option '" + k + "'");
      }
    }
    bbmlab::Json report = {{"suite", suite}, {"scale", opt.scale}, {"seed", opt.seed}, {"criteria", bbmlab::Json::array()}};
    bool all = true;
    const auto results = bbmlab::verify_suite(suite, opt, [&](const bbmlab::CriterionResult& r) {
      if (callback != nullptr) callback(bbmlab::to_json(r).dump().c_str(), user_data);
    });
    for (const auto& r : results) {
      report["criteria"].push_back(bbmlab::to_json(r));
      all = all && r.passed;
    }
    report["passed"] = all;
    auto* res = new bbmlab_result;
    res->exit_code = all ? 0 : 1;
    res->message = all ? "all criteria passed" : "some criteria failed";
    res->json = report.dump(2);
    *out = res;
  });
}

int bbmlab_result_exit_code(const bbmlab_result* result) { return result ? result->exit_code : -1; }
const char* bbmlab_result_message(const bbmlab_result* result) { return result ? result->message.c_str() : ""; }
const char* bbmlab_result_json(const bbmlab_result* result) { return result ? result->json.c_str() : ""; }
void bbmlab_result_destroy(bbmlab_result* result) { delete result; }

bbmlab_status bbmlab_report(const char* in_dir, const char* out_dir) {
  if (in_dir == nullptr) return null_pointer("in_dir");
  if (out_dir == nullptr) return null_pointer("out_dir");
  return guarded([&] { bbmlab::write_report(in_dir, out_dir); });
}

bbmlab_status bbmlab_explore_tree(double mu, double level_x, double barrier_b, int64_t count_cap, int64_t node_cap,
                                  uint64_t seed, uint64_t stream_id, bbmlab_count* out) {
  if (out == nullptr) return null_pointer("out");
  return guarded([&] {
    bbmlab::ExploreConfig c;
    c.level_x = level_x;
    c.barrier_B = barrier_b;
    c.count_cap = count_cap;
    c.node_cap = node_cap;
    const bbmlab::CensoredCount s = bbmlab::explore_tree(bbmlab::make_params(mu), c, bbmlab::RngStream(seed, stream_id));
    *out = {s.value, static_cast<bbmlab_censor_status>(s.status), s.pruned_count, s.work, s.bias_bound};
  });
}

bbmlab_status bbmlab_boundary_identities(double out_moments[3]) {
  if (out_moments == nullptr) return null_pointer("out_moments");
  return guarded([&] {
    const bbmlab::BoundaryMoments m = bbmlab::boundary_identities(bbmlab::make_params(2.0));
    out_moments[0] = m.m0;
    out_moments[1] = m.m1;
    out_moments[2] = m.m2;
  });
}

}  // extern "C"

#include <algorithm>
#include <cstdlib>
#include <string>

#include <openssl/evp.h>
#include <toml.hpp>

#include "bbmlab/error.hpp"
#include "bbmlab/experiment.hpp"

namespace bbmlab {
namespace {

std::uint64_t env_seed() {
  const char* text = std::getenv("BBMLAB_SEED");
  if (text == nullptr || *text == '\0') return 42;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (*end != '\0') fail(Errc::invalid_argument, std::string("BBMLAB_SEED is not an unsigned integer: ") + text);
  return v;
}

Json tree_defaults() {
  return {{"barrier_b", 12.0},
          {"count_cap", 100000},
          {"node_cap", 1000000000},
          {"frontier_cap", 8000000},
          {"n_grid", {1, 10, 100, 1000, 10000}},
          {"truncation_grid", {300, 1000, 3000}},
          {"lambda_grid", {0.003, 0.01}},
          {"max_excluded_fraction", 0.001}};
}

Json to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    Json out = Json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = to_json(v);
    return out;
  }
  if (const auto* a = node.as_array()) {
    Json out = Json::array();
    for (const auto& v : *a) out.push_back(to_json(v));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  fail(Errc::invalid_argument, "unsupported TOML value type");
}

bool numeric(const Json& v) { return v.is_number() && !v.is_boolean(); }

void check_type(const std::string& key, const Json& expected, const Json& value) {
  const auto bad = [&](const char* what) {
    fail(Errc::invalid_argument, "config key '" + key + "' must be " + what + ", got " + value.dump());
  };
  if (key == "windows") {
    if (!value.is_array()) bad("an array of {a, b, lambda} tables");
    for (const Json& w : value) {
      if (!w.is_object()) bad("an array of {a, b, lambda} tables");
      for (const auto& [k, v] : w.items()) {
        if ((k != "a" && k != "b" && k != "lambda") || !numeric(v)) bad("an array of {a, b, lambda} tables");
      }
    }
    return;
  }
  if (expected.is_number_integer()) {
    if (!value.is_number_integer()) bad("an integer");
  } else if (expected.is_number_float()) {
    if (!numeric(value)) bad("a number");
  } else if (expected.is_string()) {
    if (!value.is_string()) bad("a string");
  } else if (expected.is_array()) {
    if (!value.is_array() || value.empty()) bad("a non-empty array");
    const bool ints = expected.front().is_number_integer();
    for (const Json& v : value) {
      if (ints ? !v.is_number_integer() : !numeric(v)) bad(ints ? "an array of integers" : "an array of numbers");
    }
  }
}

}  // namespace

const std::vector<std::string>& run_commands() {
  static const std::vector<std::string> names{"sim-n", "sim-nx", "sim-composed", "sim-line", "sim-pop", "probe-spine"};
  return names;
}

Json default_config(std::string_view command) {
  Json c = {{"mu", 2.0},
            {"seed", env_seed()},
            {"stream", 0},
            {"samples", 10000},
            {"workers", 1},
            {"batch_size", 64},
            {"out_dir", "."}};
  if (command == "sim-n" || command == "sim-nx" || command == "sim-composed") {
    c.update(tree_defaults());
    if (command != "sim-n") c["x"] = 1.0;
    if (command == "sim-nx") c["windows"] = Json::array();
  } else if (command == "sim-line") {
    c.update({{"x", 1.0},
              {"barrier_b", 12.0},
              {"work_cap", 1000000000},
              {"slope_grid", {100, 158, 251, 398, 631, 1000, 1585, 2512, 3981, 6310, 10000}},
              {"log_log_power", 2.0},
              {"max_excluded_fraction", 0.001}});
  } else if (command == "sim-pop") {
    c.update({{"t_grid", {2.0, 5.0, 8.0}}, {"population_cap", 10000000}, {"bootstrap_replicates", 1000}});
  } else if (command == "probe-spine") {
    c.update({{"samples", 100000}, {"mto_n_grid", {1, 2, 3, 5, 8}}, {"ballot_n_grid", {25, 100, 400}}});
  } else {
    fail(Errc::invalid_argument, "unknown command '" + std::string(command) + "'");
  }
  return c;
}

Json load_toml_config(const std::string& path, std::string_view command) {
  toml::table table;
  try {
    table = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    const auto& src = e.source();
    const std::string where = path + ":" + std::to_string(src.begin.line) + ":" + std::to_string(src.begin.column);
    // A missing file is reported by toml++ as a parse error too.
    if (src.begin.line == 0) fail(Errc::io, "cannot read config " + path + ": " + std::string(e.description()));
    fail(Errc::invalid_argument, where + ": " + std::string(e.description()));
  }
  Json all = to_json(table);
  Json out = Json::object();
  for (const auto& [k, v] : all.items()) {
    if (!v.is_object()) out[k] = v;
  }
  const std::string section(command);
  if (all.contains(section) && all[section].is_object()) {
    for (const auto& [k, v] : all[section].items()) out[k] = v;
  }
  return out;
}

Json resolve_config(std::string_view command, const Json& file_values, const Json& flag_values) {
  Json config = default_config(command);
  for (const Json* layer : {&file_values, &flag_values}) {
    if (layer->is_null()) continue;
    if (!layer->is_object()) fail(Errc::invalid_argument, "config layer must be a table");
    for (const auto& [k, v] : layer->items()) {
      if (!config.contains(k)) {
        fail(Errc::invalid_argument, "unknown config key '" + k + "' for " + std::string(command));
      }
      check_type(k, config[k], v);
      config[k] = v;
    }
  }
  if (config["workers"].get<std::int64_t>() < 1) fail(Errc::invalid_argument, "workers must be >= 1");
  if (config["batch_size"].get<std::int64_t>() < 1) fail(Errc::invalid_argument, "batch_size must be >= 1");
  if (config["samples"].get<std::int64_t>() < 1) fail(Errc::invalid_argument, "samples must be >= 1");
  if (config["seed"].get<std::int64_t>() < 0 && !config["seed"].is_number_unsigned()) {
    fail(Errc::invalid_argument, "seed must be >= 0");
  }
  return config;
}

bool is_execution_key(std::string_view key) { return key == "workers" || key == "batch_size" || key == "out_dir"; }

Json experiment_part(const Json& config) {
  Json out = Json::object();
  for (const auto& [k, v] : config.items()) {
    if (!is_execution_key(k)) out[k] = v;
  }
  return out;
}

namespace {

std::string sha1_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    fail(Errc::internal, "SHA-1 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

}  // namespace

std::string config_fingerprint(const Json& config) { return sha1_hex(experiment_part(config).dump()); }

std::string git_blob_sha1(std::string_view content) {
  std::string data = "blob " + std::to_string(content.size());
  data.push_back('\0');
  data.append(content);
  return sha1_hex(data);
}

}  // namespace bbmlab

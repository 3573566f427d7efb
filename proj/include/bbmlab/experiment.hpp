#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bbmlab {

using Json = nlohmann::json;

/// Subcommands that produce samples: sim-n, sim-nx, sim-composed, sim-line,
/// sim-pop, probe-spine.
const std::vector<std::string>& run_commands();

/// Every key a command accepts with its default. `seed` defaults to the
/// BBMLAB_SEED environment variable when set, else 42.
Json default_config(std::string_view command);

/// Reads a TOML file: top-level keys apply to every command, keys of the table
/// named after `command` override them. Throws Errc::io or
/// Errc::invalid_argument.
Json load_toml_config(const std::string& path, std::string_view command);

/// defaults <- file <- flags. Unknown keys and wrongly typed values throw
/// Errc::invalid_argument.
Json resolve_config(std::string_view command, const Json& file_values, const Json& flag_values);

/// Keys that change how a run executes but not what it produces. They are
/// left out of embedded configs and fingerprints.
bool is_execution_key(std::string_view key);

/// The part of a resolved config that determines the outputs.
Json experiment_part(const Json& config);

/// SHA-1 of the canonical JSON dump of experiment_part(config), hex.
std::string config_fingerprint(const Json& config);

/// Git blob id of `content`: SHA-1 of "blob <size>\0" + content, hex.
std::string git_blob_sha1(std::string_view content);

struct RunOutcome {
  int exit_code = 0;  ///< 0 accepted, 1 cap exhaustion above threshold
  std::string message;
  Json summary;
  std::vector<std::string> files;
};

/// Runs a subcommand on a resolved config, writing its CSV and summary.json
/// into config["out_dir"] (created if missing).
RunOutcome run_command(std::string_view command, const Json& config);

/// Reads every summary.json under `in_dir` and writes report.md plus the
/// plot-ready series tail_series.csv, truncated_mean_series.csv,
/// ratio_series.csv and b_sensitivity.csv into `out_dir`. Throws Errc::io
/// before writing anything when no summary is found. Returns the paths written.
std::vector<std::string> write_report(const std::string& in_dir, const std::string& out_dir);

}  // namespace bbmlab

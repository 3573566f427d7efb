#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bbmlab/error.hpp"
#include "bbmlab/experiment.hpp"

using namespace bbmlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bbmlab_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Json small(const std::string& command, const fs::path& out, Json extra = Json::object()) {
  Json flags = {{"samples", 40}, {"out_dir", out.string()}, {"seed", 9}};
  flags.update(extra);
  return resolve_config(command, Json::object(), flags);
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const Json d = default_config("sim-n");
  EXPECT_EQ(d["mu"], 2.0);
  EXPECT_EQ(d["barrier_b"], 12.0);
  EXPECT_EQ(d["count_cap"], 100000);
  EXPECT_FALSE(d.contains("x"));
  EXPECT_TRUE(default_config("sim-nx").contains("windows"));
  EXPECT_THROW(default_config("sim-everything"), Error);

  const Json c = resolve_config("sim-n", Json{{"samples", 5}, {"barrier_b", 10.0}}, Json{{"barrier_b", 14.0}});
  EXPECT_EQ(c["samples"], 5);
  EXPECT_EQ(c["barrier_b"], 14.0);
  EXPECT_THROW(resolve_config("sim-n", Json::object(), Json{{"typo", 1}}), Error);
  EXPECT_THROW(resolve_config("sim-n", Json::object(), Json{{"samples", "many"}}), Error);
  EXPECT_THROW(resolve_config("sim-n", Json::object(), Json{{"workers", 0}}), Error);
  EXPECT_THROW(resolve_config("sim-nx", Json::object(), Json{{"windows", Json::array({Json{{"q", 1}}})}}), Error);
}

TEST(Config, TomlFileWithCommandTable) {
  const fs::path dir = fresh_dir("toml");
  std::ofstream(dir / "c.toml") << "seed = 5\nsamples = 7\n[sim-n]\nbarrier_b = 10.0\n[sim-line]\nx = 3.0\n";
  const Json f = load_toml_config((dir / "c.toml").string(), "sim-n");
  EXPECT_EQ(f["seed"], 5);
  EXPECT_EQ(f["barrier_b"], 10.0);
  EXPECT_FALSE(f.contains("x"));
  std::ofstream(dir / "bad.toml") << "seed = = 5\n";
  try {
    load_toml_config((dir / "bad.toml").string(), "sim-n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
  try {
    load_toml_config((dir / "missing.toml").string(), "sim-n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io);
  }
  fs::remove_all(dir);
}

TEST(Config, FingerprintIgnoresExecutionKeys) {
  const Json a = resolve_config("sim-n", Json::object(), Json{{"workers", 1}, {"out_dir", "a"}});
  const Json b = resolve_config("sim-n", Json::object(), Json{{"workers", 8}, {"out_dir", "b"}, {"batch_size", 3}});
  EXPECT_EQ(config_fingerprint(a), config_fingerprint(b));
  const Json c = resolve_config("sim-n", Json::object(), Json{{"seed", 43}});
  EXPECT_NE(config_fingerprint(a), config_fingerprint(c));
  EXPECT_FALSE(experiment_part(a).contains("workers"));
}

TEST(Config, GitBlobHash) {
  // Values printed by `git hash-object`.
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Runner, SimNIsReproducibleAcrossWorkerCounts) {
  const fs::path a = fresh_dir("run_a"), b = fresh_dir("run_b");
  const RunOutcome ra = run_command("sim-n", small("sim-n", a, {{"barrier_b", 5.0}, {"workers", 1}}));
  const RunOutcome rb = run_command("sim-n", small("sim-n", b, {{"barrier_b", 5.0}, {"workers", 3}, {"batch_size", 7}}));
  EXPECT_EQ(ra.exit_code, 0);
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  EXPECT_EQ(slurp(a / "n_samples.csv"), slurp(b / "n_samples.csv"));
  const std::string csv = slurp(a / "n_samples.csv");
  EXPECT_EQ(csv.rfind("# bbmlab-csv v1 n_samples\n# config {", 0), 0u);
  const Json s = Json::parse(slurp(a / "summary.json"));
  EXPECT_EQ(s["schema"], "bbmlab-summary v1");
  EXPECT_EQ(s["config"]["seed"], 9);
  EXPECT_EQ(s["config_fingerprint"], config_fingerprint(s["config"]));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Runner, EveryCommandWritesCsvAndSummary) {
  const fs::path root = fresh_dir("all");
  struct Case {
    std::string command, csv;
    Json extra;
  };
  const std::vector<Case> cases{
      {"sim-nx", "nx_samples.csv", {{"barrier_b", 5.0}, {"windows", Json::array({Json{{"a", 0.0}, {"b", 4.0}, {"lambda", 2.0}}})}}},
      {"sim-composed", "composed_samples.csv", {{"barrier_b", 5.0}}},
      {"sim-line", "line_samples.csv", {{"samples", 2000}, {"slope_grid", {2, 3, 4, 6}}}},
      {"sim-pop", "pop_functionals.csv", {{"t_grid", {1.0, 2.0}}, {"bootstrap_replicates", 50}}},
      {"probe-spine", "probes.csv", {{"samples", 2000}, {"mto_n_grid", {1, 2}}, {"ballot_n_grid", {25}}}},
  };
  for (const Case& c : cases) {
    const fs::path out = root / c.command;
    const RunOutcome r = run_command(c.command, small(c.command, out, c.extra));
    EXPECT_TRUE(fs::exists(out / c.csv)) << c.command;
    EXPECT_TRUE(fs::exists(out / "summary.json")) << c.command;
    EXPECT_EQ(Json::parse(slurp(out / "summary.json"))["command"], c.command);
    EXPECT_TRUE(r.exit_code == 0 || r.exit_code == 1) << c.command;
  }
  const fs::path rep = root / "report";
  const auto files = write_report(root.string(), rep.string());
  EXPECT_EQ(files.size(), 5u);
  const std::string md = slurp(rep / "report.md");
  EXPECT_NE(md.find("1.270363"), std::string::npos);
  EXPECT_NE(md.find("0.853553"), std::string::npos);
  EXPECT_NE(md.find("1.693147"), std::string::npos);
  fs::remove_all(root);
}

TEST(Report, EmptyInputIsAnError) {
  const fs::path in = fresh_dir("empty"), out = fresh_dir("empty_out");
  try {
    write_report(in.string(), out.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io);
  }
  EXPECT_FALSE(fs::exists(out / "report.md"));
  fs::remove_all(in);
  fs::remove_all(out);
}

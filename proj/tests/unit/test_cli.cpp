#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(BBMLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bbmlab_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, WorkerCountDoesNotChangeOutputs) {
  const fs::path a = fresh("w1"), b = fresh("w8"), c = fresh("again");
  const std::string common = "sim-n --mu 2 --barrier 6 --count-cap 1000 --samples 300 --seed 42 ";
  ASSERT_EQ(run(common + "--workers 1 --out " + a.string()), 0);
  ASSERT_EQ(run(common + "--workers 8 --out " + b.string()), 0);
  ASSERT_EQ(run(common + "--workers 1 --out " + c.string()), 0);
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  EXPECT_EQ(slurp(a / "n_samples.csv"), slurp(b / "n_samples.csv"));
  EXPECT_EQ(slurp(a / "n_samples.csv"), slurp(c / "n_samples.csv"));
  for (const auto& p : {a, b, c}) fs::remove_all(p);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const fs::path d = fresh("toml");
  fs::create_directories(d);
  std::ofstream(d / "run.toml") << "samples = 20\n[sim-n]\nbarrier_b = 4.0\nseed = 1\n";
  ASSERT_EQ(run("sim-n --config " + (d / "run.toml").string() + " --seed 2 --out " + (d / "o").string()), 0);
  const std::string s = slurp(d / "o" / "summary.json");
  EXPECT_NE(s.find("\"barrier_b\": 4.0"), std::string::npos);
  EXPECT_NE(s.find("\"seed\": 2"), std::string::npos);
  fs::remove_all(d);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("sim-n --no-such-flag"), 2);
  EXPECT_EQ(run("sim-n --barrier -1 --out /tmp/x"), 2);
  EXPECT_EQ(run("sim-n --set nope=1"), 2);
  EXPECT_EQ(run("report --in /nonexistent_bbmlab_dir"), 1);
  EXPECT_EQ(run("verify quick --only 1"), 0);
}

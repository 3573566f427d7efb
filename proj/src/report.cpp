#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include "bbmlab/error.hpp"
#include "bbmlab/experiment.hpp"
#include "io.hpp"

namespace bbmlab {
namespace {

namespace fs = std::filesystem;

struct Loaded {
  std::string source;  // path relative to the input directory
  Json summary;
};

double as_double(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return std::stod(v.get<std::string>());
  return NAN;
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return io::num(v);
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

const Json* find_estimate(const Json& summary, const std::string& name) {
  for (const Json& e : summary["estimates"]) {
    if (e["name"] == name) return &e;
  }
  return nullptr;
}

std::vector<Loaded> load_summaries(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(Errc::io, "input directory " + dir.string() + " does not exist");
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "summary.json") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Loaded> out;
  for (const fs::path& p : paths) {
    Json j;
    try {
      j = Json::parse(io::read_file(p));
    } catch (const Json::parse_error& e) {
      fail(Errc::io, "malformed summary " + p.string() + ": " + e.what());
    }
    if (j.value("schema", "") != "bbmlab-summary v1") fail(Errc::io, "unknown summary schema in " + p.string());
    out.push_back({fs::relative(p.parent_path(), dir).generic_string(), std::move(j)});
  }
  if (out.empty()) fail(Errc::io, "no summary.json found under " + dir.string());
  return out;
}

bool is_count_run(const Json& s) {
  const std::string c = s["command"];
  return c == "sim-n" || c == "sim-nx" || c == "sim-composed";
}

double level_of(const Json& s) { return s["config"].value("x", 0.0); }

}  // namespace

std::vector<std::string> write_report(const std::string& in_dir, const std::string& out_dir) {
  const std::vector<Loaded> runs = load_summaries(in_dir);

  std::ostringstream md;
  md << "# bbmlab report\n\n";
  md << "## Constants\n\n| quantity | value |\n|---|---|\n";
  md << "| c = log 2 + Euler gamma | " << fixed(std::log(2.0) + 0.57721566490153286, 6) << " |\n";
  md << "| p = (2 + sqrt 2) / 4 | " << fixed((2.0 + std::sqrt(2.0)) / 4.0, 6) << " |\n";
  md << "| 1 + log 2 | " << fixed(1.0 + std::log(2.0), 6) << " |\n\n";

  md << "## Runs\n\n| run | command | samples | fingerprint | accepted |\n|---|---|---|---|---|\n";
  for (const Loaded& r : runs) {
    md << "| " << (r.source.empty() ? "." : r.source) << " | " << r.summary["command"].get<std::string>() << " | "
       << r.summary["config"].value("samples", 0) << " | " << r.summary["config_fingerprint"].get<std::string>().substr(0, 12)
       << " | " << (r.summary.value("accepted", false) ? "yes" : "no") << " |\n";
  }

  io::CsvWriter tail_csv("tail_series", Json::object(), "source,command,mu,barrier_b,x,n,value,stderr,lo,hi");
  io::CsvWriter trunc_csv("truncated_mean_series", Json::object(), "source,command,mu,barrier_b,x,n,value,stderr,lo,hi");
  io::CsvWriter ratio_csv("ratio_series", Json::object(), "source,x,barrier_b,median,q1,q3,count");
  io::CsvWriter bsens_csv("b_sensitivity", Json::object(),
                          "source,barrier_b,samples,p_zero,p_zero_se,tail_100,tail_100_se,tail_1000,tail_1000_se,"
                          "offset_1000,offset_1000_se,mean_bias_bound");

  std::ostringstream tail_md;
  std::ostringstream trunc_md;
  for (const Loaded& r : runs) {
    if (!is_count_run(r.summary)) continue;
    const Json& cfg = r.summary["config"];
    for (const Json& e : r.summary["estimates"]) {
      const std::string name = e["name"];
      const auto at = name.find('@');
      if (at == std::string::npos) continue;
      const std::string stem = name.substr(0, at);
      if (stem != "tail_ratio" && stem != "truncated_mean_offset") continue;
      const std::int64_t n = std::stoll(name.substr(at + 1));
      const double v = as_double(e["value"]);
      const double se = as_double(e["stderr"]);
      const double lo = as_double(e["ci"][0]);
      const double hi = as_double(e["ci"][1]);
      io::CsvWriter& out = stem == "tail_ratio" ? tail_csv : trunc_csv;
      out.row(r.source, r.summary["command"].get<std::string>(), cfg.value("mu", 2.0), cfg.value("barrier_b", 0.0),
              level_of(r.summary), n, v, se, lo, hi);
      std::ostringstream& m = stem == "tail_ratio" ? tail_md : trunc_md;
      m << "| " << r.source << " | " << cfg.value("mu", 2.0) << " | " << cfg.value("barrier_b", 0.0) << " | "
        << level_of(r.summary) << " | " << n << " | " << fixed(v, 4) << " | " << fixed(se, 4) << " | [" << fixed(lo, 4)
        << ", " << fixed(hi, 4) << "] |\n";
    }
  }
  md << "\n## Tail: n P(N >= n)\n\n| run | mu | B | x | n | value | stderr | 95% CI |\n|---|---|---|---|---|---|---|---|\n"
     << tail_md.str();
  md << "\n## Truncated mean: E[N 1{N <= n}] - log n\n\n| run | mu | B | x | n | value | stderr | 95% CI |\n"
        "|---|---|---|---|---|---|---|---|\n"
     << trunc_md.str();

  md << "\n## B-sensitivity (sim-n, mu = 2)\n\n| run | B | samples | P(N=0) | 100 P(N>=100) | 1000 P(N>=1000) | "
        "offset at 1000 | mean bias bound |\n|---|---|---|---|---|---|---|---|\n";
  std::vector<const Loaded*> bruns;
  for (const Loaded& r : runs) {
    if (r.summary["command"] == "sim-n" && r.summary["config"].value("mu", 0.0) == 2.0) bruns.push_back(&r);
  }
  std::stable_sort(bruns.begin(), bruns.end(), [](const Loaded* a, const Loaded* b) {
    return a->summary["config"].value("barrier_b", 0.0) < b->summary["config"].value("barrier_b", 0.0);
  });
  for (const Loaded* r : bruns) {
    auto pick = [&](const char* name) -> std::pair<double, double> {
      const Json* e = find_estimate(r->summary, name);
      return e ? std::pair{as_double((*e)["value"]), as_double((*e)["stderr"])} : std::pair<double, double>{NAN, NAN};
    };
    const auto p0 = pick("p_zero");
    const auto t100 = pick("tail_ratio@100");
    const auto t1000 = pick("tail_ratio@1000");
    const auto o1000 = pick("truncated_mean_offset@1000");
    const double bias = as_double(r->summary["diagnostics"].value("mean_bias_bound", Json(NAN)));
    const double b = r->summary["config"].value("barrier_b", 0.0);
    const std::int64_t samples = r->summary["config"].value("samples", 0);
    bsens_csv.row(r->source, b, samples, p0.first, p0.second, t100.first, t100.second, t1000.first, t1000.second,
                  o1000.first, o1000.second, bias);
    auto pm = [](std::pair<double, double> v) { return fixed(v.first, 4) + " ± " + fixed(v.second, 4); };
    md << "| " << r->source << " | " << b << " | " << samples << " | " << pm(p0) << " | " << pm(t100) << " | "
       << pm(t1000) << " | " << pm(o1000) << " | " << io::num(bias) << " |\n";
  }

  md << "\n## Ratio N_x / (x Z_x) (sim-composed)\n\n| run | x | B | median | q1 | q3 | samples |\n"
        "|---|---|---|---|---|---|---|\n";
  std::vector<const Loaded*> rruns;
  for (const Loaded& r : runs) {
    if (r.summary["command"] == "sim-composed" && r.summary["diagnostics"].contains("ratio")) rruns.push_back(&r);
  }
  std::stable_sort(rruns.begin(), rruns.end(),
                   [](const Loaded* a, const Loaded* b) { return level_of(a->summary) < level_of(b->summary); });
  for (const Loaded* r : rruns) {
    const Json& q = r->summary["diagnostics"]["ratio"];
    const double b = r->summary["config"].value("barrier_b", 0.0);
    ratio_csv.row(r->source, q["x"].get<double>(), b, q["median"].get<double>(), q["q1"].get<double>(),
                  q["q3"].get<double>(), q["count"].get<std::int64_t>());
    md << "| " << r->source << " | " << q["x"].get<double>() << " | " << b << " | " << fixed(q["median"], 4) << " | "
       << fixed(q["q1"], 4) << " | " << fixed(q["q3"], 4) << " | " << q["count"].get<std::int64_t>() << " |\n";
  }

  md << "\n## All estimates\n\n| run | estimate | value | stderr | n |\n|---|---|---|---|---|\n";
  for (const Loaded& r : runs) {
    for (const Json& e : r.summary["estimates"]) {
      md << "| " << r.source << " | " << e["name"].get<std::string>() << " | " << fixed(as_double(e["value"]), 6) << " | "
         << fixed(as_double(e["stderr"]), 6) << " | " << e["n"].get<std::int64_t>() << " |\n";
    }
  }

  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(Errc::io, "cannot create " + out.string() + ": " + ec.message());
  const std::vector<std::pair<std::string, std::string>> files{{"report.md", md.str()},
                                                               {"tail_series.csv", tail_csv.text()},
                                                               {"truncated_mean_series.csv", trunc_csv.text()},
                                                               {"ratio_series.csv", ratio_csv.text()},
                                                               {"b_sensitivity.csv", bsens_csv.text()}};
  std::vector<std::string> written;
  for (const auto& [name, text] : files) {
    io::write_file(out / name, text);
    written.push_back((out / name).string());
  }
  return written;
}

}  // namespace bbmlab

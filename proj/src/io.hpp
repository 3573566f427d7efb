#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "bbmlab/error.hpp"
#include "bbmlab/experiment.hpp"
#include "bbmlab/stats.hpp"

namespace bbmlab::io {

/// Shortest round-trip text for v; inf/nan spelled out.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string num(std::int64_t v) { return std::to_string(v); }

/// JSON cannot hold inf/nan; they become strings.
inline Json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

inline Json estimate_json(const std::string& name, const EstimateCI& e) {
  return {{"name", name},         {"value", jnum(e.value)}, {"stderr", jnum(e.std_error)},
          {"ci", {jnum(e.lo), jnum(e.hi)}}, {"level", e.level}, {"n", e.n_samples}};
}

/// CSV text with the two versioned comment lines and the column header.
class CsvWriter {
 public:
  CsvWriter(std::string_view schema, const Json& config, std::string_view columns) {
    text_ += "# bbmlab-csv v1 ";
    text_ += schema;
    text_ += "\n# config ";
    text_ += experiment_part(config).dump();
    text_ += "\n";
    text_ += columns;
    text_ += "\n";
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
    text_ += "\n";
  }

  const std::string& text() const noexcept { return text_; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(std::int64_t v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::string_view v) { return std::string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

  std::string text_;
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(Errc::io, "write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace bbmlab::io

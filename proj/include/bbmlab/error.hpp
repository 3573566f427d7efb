#pragma once

#include <stdexcept>
#include <string>

namespace bbmlab {

/// Failure categories shared by the C++ core and the C API status codes.
enum class Errc {
  invalid_argument = 1,
  precondition = 2,
  censoring = 3,
  sample_starved = 4,
  resource_exhausted = 5,
  io = 6,
  internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace bbmlab

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bbmlab/experiment.hpp"

namespace bbmlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  ///< one-line human summary of the measured values
  Json measured;       ///< machine-readable measured values and tolerances
  double seconds = 0.0;
};

struct VerifyOptions {
  int workers = 1;
  std::uint64_t seed = 20260101;
  /// Multiplies every Monte Carlo sample size. 1 is the acceptance scale;
  /// smaller values are for smoke runs and never count as acceptance.
  double scale = 1.0;
  /// Criteria to run; empty means the whole suite.
  std::vector<int> only;
  /// Scratch directory for criteria that go through the file-writing runner.
  std::string scratch_dir;
};

/// quick: closed forms, boundary identities, many-to-one for n <= 3, and the
/// determinism checks. full: criteria 1-12.
std::vector<int> suite_criteria(std::string_view suite);

/// Runs the suite, calling `on_result` as each criterion finishes.
std::vector<CriterionResult> verify_suite(std::string_view suite, const VerifyOptions& options,
                                          const std::function<void(const CriterionResult&)>& on_result = {});

Json to_json(const CriterionResult& result);

}  // namespace bbmlab

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bbmlab/spine.hpp"

namespace bbmlab {

struct NamedEvent {
  std::string name;
  PathEvent event;
};

/// Path functionals 1{S_n <= K, min S >= -alpha} checked by the many-to-one
/// suite. All have K <= 2, so the spine weight e^{S_n} stays bounded.
inline std::vector<NamedEvent> many_to_one_battery() {
  const double inf = INFINITY;
  return {{"S_n<=0", {0.0, -inf}},
          {"S_n<=1,min>=-5", {1.0, -5.0}},
          {"S_n<=2,min>=-2", {2.0, -2.0}},
          {"S_n<=-1,min>=-8", {-1.0, -8.0}}};
}

/// Probe parameter grid for the four ballot-type bounds.
inline std::vector<ProbeSpec> ballot_grid() {
  std::vector<ProbeSpec> grid{{BallotKind::local_limit, 0.0, 0.0, 0.0}};
  for (const double alpha : {0.5, 2.0, 8.0}) grid.push_back({BallotKind::ballot, alpha, 0.0, 0.0});
  for (const double alpha : {0.5, 2.0}) {
    for (const double h : {1.0, 4.0}) grid.push_back({BallotKind::ballot_backward, alpha, h, 0.0});
  }
  for (const double alpha : {0.5, 2.0}) {
    for (const double a : {0.0, 2.0}) {
      for (const double h : {1.0, 4.0}) grid.push_back({BallotKind::three_factor, alpha, h, a});
    }
  }
  return grid;
}

}  // namespace bbmlab

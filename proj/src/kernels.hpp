#pragma once

#include <cstddef>
#include <cstdint>

namespace bbmlab::kernels {

struct MixtureRates {
  double q;  ///< mass of the negative branch, 1 - p
  double p;
  double r_minus;
  double r_plus;
};

/// labels[2i], labels[2i+1] = tree children of parents[i].
void child_labels(const std::uint64_t* parents, std::uint64_t* labels, std::size_t n) noexcept;

/// out[i] = parent_pos[i / 2] + inverse-CDF displacement of labels[i].
void child_positions(const double* parent_pos, const std::uint64_t* labels, double* out, std::size_t n_children,
                     const MixtureRates& rates) noexcept;

}  // namespace bbmlab::kernels

// Hot loops of the tree explorer. This file is compiled with flags that let
// the compiler call the SIMD variants of log() (see src/CMakeLists.txt); no
// other translation unit depends on those flags.
#include "kernels.hpp"

#include <cmath>

#include "bbmlab/rng.hpp"

namespace bbmlab::kernels {

void child_labels(const std::uint64_t* parents, std::uint64_t* labels, std::size_t n) noexcept {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    const auto [left, right] = RngStream::tree_children(parents[i]);
    labels[2 * i] = left;
    labels[2 * i + 1] = right;
  }
}

void child_positions(const double* parent_pos, const std::uint64_t* labels, double* out, std::size_t n_children,
                     const MixtureRates& rates) noexcept {
  constexpr std::size_t kBlock = 256;
  const double inv_q = 1.0 / rates.q;
  const double inv_p = 1.0 / rates.p;
  const double inv_rm = 1.0 / rates.r_minus;
  const double neg_inv_rp = -1.0 / rates.r_plus;
  double arg[kBlock];
  double scale[kBlock];
  for (std::size_t begin = 0; begin < n_children; begin += kBlock) {
    const std::size_t m = n_children - begin < kBlock ? n_children - begin : kBlock;
    const std::uint64_t* lab = labels + begin;
#pragma omp simd
    for (std::size_t i = 0; i < m; ++i) {
      const double u = (static_cast<double>(static_cast<std::int64_t>(lab[i] >> 12)) + 0.5) * 0x1p-52;
      const bool negative = u < rates.q;
      arg[i] = negative ? u * inv_q : (1.0 - u) * inv_p;
      scale[i] = negative ? inv_rm : neg_inv_rp;
    }
#pragma omp simd
    for (std::size_t i = 0; i < m; ++i) arg[i] = std::log(arg[i]);
    for (std::size_t i = 0; i < m; ++i) out[begin + i] = parent_pos[(begin + i) / 2] + arg[i] * scale[i];
  }
}

}  // namespace bbmlab::kernels

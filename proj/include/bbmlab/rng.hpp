#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace bbmlab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }
};

/// SplitMix64 finalizer; used only to derive stream ids and keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Uniform on the open interval (0, 1) from the top 52 bits; every value is exact.
inline double unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
}

/// A reproducible random stream identified by (seed, stream_id).
///
/// Sequential draws walk the Philox counter; `split` derives an independent
/// child stream; `keyed` evaluates the generator at an arbitrary 64-bit label
/// under a separate key, which is how tree explorers give every node the same
/// randomness regardless of traversal order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() noexcept {
    if (has_spare_word_) {
      has_spare_word_ = false;
      return spare_word_;
    }
    const auto [a, b] = block(block_++, key_for(seed_));
    spare_word_ = b;
    has_spare_word_ = true;
    return a;
  }

  double uniform() noexcept { return unit_open(next_u64()); }

  double exponential() noexcept { return -std::log(uniform()); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept {
    if (has_spare_normal_) {
      has_spare_normal_ = false;
      return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * 3.14159265358979323846 * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_normal_ = true;
    return r * std::cos(theta);
  }

  RngStream split(std::uint64_t index) const noexcept {
    return RngStream(seed_, mix64(stream_id_ ^ mix64(index + 0x632BE59BD9B4E019ull)));
  }

  /// Two words attached to `label` within this stream. Independent of the
  /// sequential position.
  std::pair<std::uint64_t, std::uint64_t> keyed(std::uint64_t label) const noexcept {
    return block_at(label, stream_id_, key_for(seed_ ^ 0xA0761D6478BD642Full));
  }

  /// Label of the root of a tree drawn from this stream.
  std::uint64_t tree_root() const noexcept { return keyed(0).first; }

  /// Labels of the two children of `label`. SplitMix64-style keyed hash: a
  /// bijection per child index, so distinct parents never share a child
  /// label, and ~10x cheaper than a Philox block per node.
  static std::pair<std::uint64_t, std::uint64_t> tree_children(std::uint64_t label) noexcept {
    return {mix64(mix64(label ^ 0x5851F42D4C957F2Dull)), mix64(mix64(label ^ 0x14057B7EF767814Full))};
  }

 private:
  static Philox4x32::Key key_for(std::uint64_t s) noexcept {
    return {static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  }

  std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t index, Philox4x32::Key key) const noexcept {
    return block_at(index, stream_id_, key);
  }

  static std::pair<std::uint64_t, std::uint64_t> block_at(std::uint64_t lo, std::uint64_t hi,
                                                          Philox4x32::Key key) noexcept {
    const auto out = Philox4x32::apply({static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                                        static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)},
                                       key);
    return {std::uint64_t{out[0]} | (std::uint64_t{out[1]} << 32), std::uint64_t{out[2]} | (std::uint64_t{out[3]} << 32)};
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_word_ = 0;
  bool has_spare_word_ = false;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace bbmlab

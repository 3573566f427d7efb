#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bbmlab/rng.hpp"

using namespace bbmlab;

// Known answers for Philox4x32-10 from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, SameSeedSameSequence) {
  RngStream a(7, 3), b(7, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, StreamsAndSplitsDiffer) {
  RngStream a(7, 3), b(7, 4);
  RngStream c = RngStream(7, 3).split(0), d = RngStream(7, 3).split(1);
  std::set<std::uint64_t> first{a.next_u64(), b.next_u64(), c.next_u64(), d.next_u64()};
  EXPECT_EQ(first.size(), 4u);
}

TEST(RngStream, SplitIgnoresParentPosition) {
  RngStream a(11, 0);
  const RngStream before = a.split(5);
  for (int i = 0; i < 10; ++i) a.next_u64();
  RngStream x = before, y = a.split(5);
  EXPECT_EQ(x.next_u64(), y.next_u64());
}

TEST(RngStream, UniformOpenInterval) {
  EXPECT_GT(unit_open(0), 0.0);
  EXPECT_LT(unit_open(~0ull), 1.0);
}

TEST(RngStream, MomentsOfUniformExponentialNormal) {
  RngStream r(1, 1);
  const int n = 400000;
  double su = 0, se = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    su += r.uniform();
    se += r.exponential();
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(se / n, 1.0, 5 * std::sqrt(1.0 / n));
  EXPECT_NEAR(sn / n, 0.0, 5 * std::sqrt(1.0 / n));
  EXPECT_NEAR(sn2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(RngStream, TreeLabelsAreStable) {
  const RngStream r(5, 9);
  EXPECT_EQ(r.tree_root(), RngStream(5, 9).tree_root());
  const auto [l, rr] = RngStream::tree_children(r.tree_root());
  EXPECT_NE(l, rr);
}

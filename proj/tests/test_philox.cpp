#include <gtest/gtest.h>

#include "smpfp/philox.hpp"

using smpfp::Philox4x32;
using smpfp::RoundStream;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, UsableAtCompileTime) {
  constexpr auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  static_assert(out[0] == 0x6627e8d5u);
}

TEST(RoundStream, WordLayout) {
  RoundStream s(0, 0);
  EXPECT_EQ(s.next_u64(), 0xe169c58d6627e8d5ull);
  EXPECT_EQ(s.next_u64(), 0x9b00dbd8bc57ac4cull);
  const auto next = Philox4x32::block({0, 0, 1, 0}, {0, 0});
  EXPECT_EQ(s.next_u64(), (std::uint64_t{next[1]} << 32) | next[0]);
}

TEST(RoundStream, RoundsAndStreamsAreIndependent) {
  RoundStream a(42, 7), b(42, 7), c(42, 8), d(42, 7, 1), e(43, 7);
  const auto va = a.next_u64();
  EXPECT_EQ(va, b.next_u64());
  EXPECT_NE(va, c.next_u64());
  EXPECT_NE(va, d.next_u64());
  EXPECT_NE(va, e.next_u64());
}

TEST(RoundStream, UniformAndBelowRanges) {
  RoundStream s(1, 2);
  std::vector<int> hist(5);
  for (int i = 0; i < 50000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = s.below(5);
    ASSERT_LT(k, 5u);
    ++hist[k];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

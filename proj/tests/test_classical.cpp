#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "smpfp/classical.hpp"

using namespace smpfp;

namespace {
Rational R(long num, long den = 1) { return Rational(num) / den; }
}  // namespace

TEST(Factorial, SmallValuesAndOverflowGuard) {
  EXPECT_EQ(factorial(0), 1u);
  EXPECT_EQ(factorial(8), 40320u);
  EXPECT_EQ(factorial(20), 2432902008176640000ull);
  EXPECT_THROW(factorial(21), InvalidArgument);
}

TEST(PermutationKey, LexicographicRanks) {
  EXPECT_EQ(PermutationKey::identity(5).rank(), 0u);
  EXPECT_EQ(PermutationKey::from_rank(3, 5).values(), (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_EQ(PermutationKey::from_rank(3, 1).values(), (std::vector<std::size_t>{0, 2, 1}));
  EXPECT_THROW(PermutationKey::from_rank(3, 6), InvalidArgument);
  EXPECT_THROW(PermutationKey({0, 0, 1}), InvalidArgument);
}

TEST(PermutationKey, RankRoundTripMatchesNextPermutation) {
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    std::uint64_t rank = 0;
    do {
      ASSERT_EQ(PermutationKey::from_rank(n, rank).values(), p);
      ASSERT_EQ(PermutationKey(p).rank(), rank);
      ++rank;
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_EQ(rank, factorial(n));
  }
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> pick(0, factorial(20) - 1);
  for (int i = 0; i < 1000; ++i) {
    const auto r = pick(rng);
    ASSERT_EQ(PermutationKey::from_rank(20, r).rank(), r);
  }
}

TEST(GroupAssignment, BalancedSizes) {
  const auto g = GroupAssignment::balanced(7, 3);
  EXPECT_EQ(g.group_sizes(), (std::vector<std::size_t>{3, 2, 2}));
  EXPECT_EQ(g.groups, (std::vector<std::size_t>{0, 1, 2, 0, 1, 2, 0}));
}

TEST(Bounds, KnownValues) {
  EXPECT_EQ(min_error_mass(4, 2), Integer(4));
  EXPECT_EQ(min_error_mass(7, 3), Integer(10));
  EXPECT_EQ(classical_bound(7, 3), R(5, 21));
  EXPECT_EQ(classical_bound(8, 2), R(3, 7));
  EXPECT_EQ(classical_bound(12, 2), R(5, 11));
  EXPECT_EQ(classical_bound(3, 2), R(1, 3));
  EXPECT_EQ(classical_bound(2, 2), R(0));
  EXPECT_EQ(classical_bound(1, 1), R(0));
  EXPECT_EQ(classical_bound(5, 1), R(1));
  EXPECT_EQ(semiclassical_bound(6, 2), R(2, 15));
  EXPECT_THROW(classical_bound(0, 1), InvalidArgument);
  EXPECT_THROW(classical_bound(3, 0), InvalidArgument);
}

TEST(Bounds, PermutedClosedFormAgrees) {
  for (std::size_t n = 1; n <= 64; ++n) {
    for (std::size_t m = 1; m <= n; ++m) ASSERT_EQ(classical_bound(n, m), exact_permuted_error(n, m)) << n << "," << m;
  }
}

TEST(Bounds, DivisibleCase) {
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t l = 1; l * m <= 64; ++l) {
      const std::size_t n = l * m;
      if (n == 1) continue;
      ASSERT_EQ(classical_bound(n, m), Rational(l - 1) / (n - 1));
    }
  }
}

TEST(Bounds, MonotoneAndBelowOneOverM) {
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t n = 1; n <= 64; ++n) {
      const auto b = classical_bound(n, m);
      ASSERT_LE(b, Rational(1) / m);
      if (n > 1) {
        ASSERT_LE(classical_bound(n - 1, m), b);
      }
      if (m > 1) {
        ASSERT_LE(b, classical_bound(n, m - 1));
      }
    }
  }
  EXPECT_LT(R(1, 2) - classical_bound(64, 2), R(1, 64));
}

TEST(PermutedGrouping, UniformErrorOnUnequalPairs) {
  for (auto [n, m, expect] : {std::tuple{3, 2, R(1, 3)}, std::tuple{5, 2, R(2, 5)}, std::tuple{6, 3, R(1, 5)}}) {
    const auto prof = error_profile(permuted_grouping(n, m));
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) ASSERT_EQ(prof.pe(x, y), x == y ? R(0) : expect);
    }
    EXPECT_EQ(prof.wce, expect);
  }
}

TEST(PermutedGrouping, LazyKeySpaceBeyondEnumeration) {
  const auto t = permuted_grouping(10, 3);
  EXPECT_TRUE(t.alice().is_lazy());
  EXPECT_EQ(t.keys().size(), factorial(10));
  const std::uint64_t key = 1234567;
  const auto perm = PermutationKey::from_rank(10, key);
  for (std::size_t x = 0; x < 10; ++x) EXPECT_EQ(t.alice().fingerprint(key, x), permuted_group(perm, x, 3));
  EXPECT_THROW(permuted_grouping(21, 2), InvalidArgument);
}

// Counts distinct canonical labelings reached from all n! relabelings of the
// balanced assignment.
TEST(PartitionGrouping, KeyCountMatchesEnumeration) {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (std::size_t m = 1; m <= 4; ++m) {
      std::set<std::vector<std::size_t>> seen;
      std::vector<std::size_t> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = i;
      do {
        std::vector<std::size_t> raw(n), canon(n);
        for (std::size_t x = 0; x < n; ++x) raw[x] = p[x] % m;
        std::vector<int> relabel(m, -1);
        int next = 0;
        for (std::size_t x = 0; x < n; ++x) {
          if (relabel[raw[x]] < 0) relabel[raw[x]] = next++;
          canon[x] = static_cast<std::size_t>(relabel[raw[x]]);
        }
        seen.insert(canon);
      } while (std::next_permutation(p.begin(), p.end()));
      ASSERT_EQ(distinct_balanced_partitions(n, m), Integer(seen.size())) << n << "," << m;
      ASSERT_EQ(partition_grouping(n, m).keys().size(), seen.size());
    }
  }
}

TEST(PartitionGrouping, SameProfileAsFullPermutationSpace) {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (std::size_t m = 1; m <= 3; ++m) {
      const auto full = error_profile(permuted_grouping(n, m));
      const auto quotient = error_profile(partition_grouping(n, m));
      ASSERT_EQ(full.pe, quotient.pe);
    }
  }
}

// The full 8! key space sits exactly at the default evaluation limit.
TEST(PartitionGrouping, EightMessagesFullEnumeration) {
  const auto full = error_profile(permuted_grouping(8, 2));
  EXPECT_EQ(full.wce, R(3, 7));
  EXPECT_EQ(full.pe(0, 0), R(0));
  EXPECT_EQ(full.pe(2, 7), R(3, 7));
  EXPECT_EQ(error_profile(partition_grouping(8, 2)).pe, full.pe);
}

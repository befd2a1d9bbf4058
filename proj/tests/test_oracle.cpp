#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "smpfp/classical.hpp"
#include "smpfp/oracle.hpp"

using namespace smpfp;

TEST(FFunctional, HandExample) {
  // rows (3, 1), cols (1, 3); only the two off-diagonal cells are nonzero.
  const OverlapMatrix s(2, 2, {0, 3, 1, 0});
  EXPECT_EQ(f_functional_quadruple(s), 10u);
  EXPECT_EQ(f_functional(s), 10u);
  EXPECT_TRUE(verify_diagonal_dominance(s));
}

TEST(FFunctional, QuadrupleSumMatchesFastForm) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 5);
  std::uniform_int_distribution<int> zero(0, 2), val(1, 6);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t ma = dim(rng), mb = dim(rng);
    std::vector<std::uint64_t> v(ma * mb);
    for (auto& e : v) e = zero(rng) == 0 ? 0 : static_cast<std::uint64_t>(val(rng));
    const OverlapMatrix s(ma, mb, v);
    ASSERT_EQ(f_functional_quadruple(s), f_functional(s));
  }
}

TEST(FFunctional, DiagonalDominanceOnRandomMatrices) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  std::uniform_int_distribution<int> zero(0, 2), val(1, 9);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t ma = dim(rng), mb = dim(rng);
    std::vector<std::uint64_t> v(ma * mb);
    for (auto& e : v) e = zero(rng) == 0 ? 0 : static_cast<std::uint64_t>(val(rng));
    ASSERT_TRUE(verify_diagonal_dominance(OverlapMatrix(ma, mb, v)));
  }
}

// Over all compositions of n into m parts, sum of squares is minimized by the
// balanced one.
TEST(MinF, MatchesCompositionEnumeration) {
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t m = 1; m <= 5; ++m) {
      std::uint64_t best = UINT64_MAX;
      std::function<void(std::size_t, std::size_t, std::uint64_t)> walk = [&](std::size_t part, std::size_t left,
                                                                             std::uint64_t acc) {
        if (part + 1 == m) {
          best = std::min(best, acc + left * left);
          return;
        }
        for (std::size_t c = 0; c <= left; ++c) walk(part + 1, left - c, acc + c * c);
      };
      walk(0, n, 0);
      ASSERT_EQ(min_f_over_diagonal(n, m), Integer(best)) << n << "," << m;
    }
  }
  EXPECT_EQ(min_f_over_diagonal(7, 3), Integer(17));
}

TEST(NeOfDeterministic, GroupingPairMatchesErrorProfile) {
  const auto g = GroupAssignment::balanced(7, 3);
  EXPECT_EQ(ne_of_deterministic(g, g), 10);
  const auto t = grouping_strategy(7, 3);
  EXPECT_EQ(Rational(ne_of_deterministic(g, g)), error_profile(t).ne);
}

TEST(Oracle, MatchesClosedFormOnSmallGrid) {
  for (std::size_t m = 1; m <= 3; ++m) {
    for (std::size_t n = m; n <= 7; ++n) {
      const auto r = exhaustive_min_ne(n, m, m);
      ASSERT_EQ(Integer(r.min_ne), min_error_mass(n, m)) << n << "," << m;
      ASSERT_TRUE(r.matches_bound);
    }
  }
}

TEST(Oracle, FixedFrozenMinima) {
  EXPECT_EQ(exhaustive_min_ne(4, 2, 4).min_ne, 4);
  EXPECT_EQ(exhaustive_min_ne(5, 2, 2).min_ne, 8);
  EXPECT_EQ(exhaustive_min_ne(4, 2, 3).min_ne, 4);
  EXPECT_EQ(exhaustive_min_ne(8, 2, 2).min_ne, 24);
}

TEST(Oracle, PruningKeepsTheMinimum) {
  OracleOptions pruned;
  pruned.prune_alice_relabelings = true;
  for (auto [n, ma, mb] : {std::tuple{6, 3, 3}, std::tuple{5, 2, 4}, std::tuple{7, 2, 2}}) {
    const auto full = exhaustive_min_ne(n, ma, mb);
    const auto fast = exhaustive_min_ne(n, ma, mb, pruned);
    EXPECT_EQ(full.min_ne, fast.min_ne);
    EXPECT_LT(fast.strategies_scanned, full.strategies_scanned);
    EXPECT_TRUE(fast.pruned);
  }
}

TEST(Oracle, ThreadCountDoesNotChangeTheReport) {
  OracleOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = exhaustive_min_ne(6, 2, 3, one);
  const auto b = exhaustive_min_ne(6, 2, 3, four);
  EXPECT_EQ(a.min_ne, b.min_ne);
  EXPECT_EQ(a.witness_count, b.witness_count);
  ASSERT_EQ(a.witnesses.size(), b.witnesses.size());
  for (std::size_t i = 0; i < a.witnesses.size(); ++i) {
    EXPECT_EQ(a.witnesses[i].alice, b.witnesses[i].alice);
    EXPECT_EQ(a.witnesses[i].bob, b.witnesses[i].bob);
  }
}

TEST(Oracle, WitnessesAttainTheMinimum) {
  const auto r = exhaustive_min_ne(6, 3, 3);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_LE(r.witnesses.size(), 64u);
  EXPECT_GE(r.witness_count, r.witnesses.size());
  for (const auto& w : r.witnesses) EXPECT_EQ(ne_of_deterministic(w.alice, w.bob), r.min_ne);
}

// A shared-randomness strategy is a mixture of deterministic ones, so its
// average error mass cannot fall below the deterministic minimum.
TEST(Oracle, RandomizedStrategiesCannotBeatIt) {
  std::mt19937_64 rng(13);
  for (auto [n, m] : {std::pair{4, 2}, std::pair{5, 2}, std::pair{6, 3}}) {
    const auto minimum = Rational(exhaustive_min_ne(n, m, m).min_ne);
    std::uniform_int_distribution<std::size_t> fp(0, m - 1);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t keys = 1 + trial % 4;
      std::vector<std::vector<std::size_t>> a(keys, std::vector<std::size_t>(n)), b = a;
      for (std::size_t k = 0; k < keys; ++k) {
        for (int x = 0; x < n; ++x) {
          a[k][x] = fp(rng);
          b[k][x] = fp(rng);
        }
      }
      const auto alice = PartyStrategy::from_assignments(m, a);
      const auto bob = PartyStrategy::from_assignments(m, b);
      const auto sigma = SharedKeyDistribution::uniform(keys);
      const StrategyTriple t(ProtocolParams::symmetric(n, m), alice, bob, derive_referee(alice, bob, sigma), sigma);
      ASSERT_GE(error_profile(t).ne, minimum);
    }
  }
}

TEST(Oracle, BudgetRefusal) {
  OracleOptions tiny;
  tiny.budget = 100;
  EXPECT_THROW(exhaustive_min_ne(5, 2, 2, tiny), BudgetExceeded);
  EXPECT_THROW(exhaustive_min_ne(0, 2, 2), InvalidArgument);
}

#pragma once

// Optimal classical one-sided fingerprinting: balanced grouping of messages
// into m fingerprints, the same grouping behind a uniformly random shared
// relabeling of the messages, and the closed-form error bounds.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "smpfp/rational.hpp"
#include "smpfp/strategy.hpp"

namespace smpfp {

/// Largest n for which permutation keys are materialized as assignment tables.
inline constexpr std::size_t kEnumeratedPermutationLimit = 8;
/// Largest n whose n! fits in a 64-bit key index.
inline constexpr std::size_t kMaxRankablePermutation = 20;

inline std::uint64_t factorial(std::size_t n) {
  if (n > kMaxRankablePermutation) throw InvalidArgument(std::to_string(n) + "! overflows a 64-bit key index");
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Deterministic fingerprinting function: groups[x] is the fingerprint of message x.
struct GroupAssignment {
  std::vector<std::size_t> groups;
  std::size_t alphabet = 1;

  /// Message x goes to fingerprint x mod m, so the first n mod m fingerprints
  /// receive ceil(n/m) messages and the rest floor(n/m).
  static GroupAssignment balanced(std::size_t n, std::size_t m) {
    if (n < 1 || m < 1) throw InvalidArgument("balanced assignment needs n, m >= 1");
    GroupAssignment g;
    g.alphabet = m;
    g.groups.resize(n);
    for (std::size_t x = 0; x < n; ++x) g.groups[x] = x % m;
    return g;
  }

  std::size_t messages() const noexcept { return groups.size(); }

  std::vector<std::size_t> group_sizes() const {
    std::vector<std::size_t> sizes(alphabet, 0);
    for (auto a : groups) ++sizes.at(a);
    return sizes;
  }

  void validate() const {
    if (alphabet < 1) throw InvalidArgument("assignment alphabet must be non-empty");
    for (auto a : groups) {
      if (a >= alphabet) throw InvalidArgument("assignment uses fingerprint outside alphabet");
    }
  }

  friend bool operator==(const GroupAssignment&, const GroupAssignment&) = default;
};

/// A relabeling of the n messages together with its rank.
///
/// Ranking is the Lehmer code read as a factorial-base number, which orders
/// permutations lexicographically: rank 0 is the identity, rank n!-1 the
/// reversal.  rank = sum_i c_i (n-1-i)! with c_i = #{j > i : perm[j] < perm[i]}.
class PermutationKey {
 public:
  explicit PermutationKey(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
    std::vector<bool> seen(perm_.size(), false);
    for (auto v : perm_) {
      if (v >= perm_.size() || seen[v]) throw InvalidArgument("not a permutation");
      seen[v] = true;
    }
  }

  static PermutationKey identity(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return PermutationKey(std::move(p));
  }

  static PermutationKey from_rank(std::size_t n, std::uint64_t rank) {
    const std::uint64_t total = factorial(n);
    if (rank >= total) throw InvalidArgument("permutation rank out of range");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> perm;
    perm.reserve(n);
    std::uint64_t radix = total;
    for (std::size_t i = 0; i < n; ++i) {
      radix /= (n - i);
      const auto digit = static_cast<std::size_t>(rank / radix);
      rank %= radix;
      perm.push_back(pool[digit]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return PermutationKey(std::move(perm));
  }

  std::uint64_t rank() const {
    const std::size_t n = perm_.size();
    if (n > kMaxRankablePermutation) throw InvalidArgument("permutation too long to rank in 64 bits");
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t smaller = 0;
      for (std::size_t j = i + 1; j < n; ++j) smaller += perm_[j] < perm_[i];
      r = r * (n - i) + smaller;
    }
    return r;
  }

  std::size_t size() const noexcept { return perm_.size(); }
  std::size_t operator()(std::size_t x) const { return perm_.at(x); }
  const std::vector<std::size_t>& values() const noexcept { return perm_; }

  friend bool operator==(const PermutationKey&, const PermutationKey&) = default;

 private:
  std::vector<std::size_t> perm_;
};

/// Sum of squared group sizes of the balanced split of n items into m groups:
/// k ceil(n/m)^2 + (m-k) floor(n/m)^2 with k = n mod m.
inline Integer balanced_square_sum(std::size_t n, std::size_t m) {
  if (m < 1) throw InvalidArgument("m must be >= 1");
  const std::size_t k = n % m;
  const Integer lo(n / m);
  const Integer hi = lo + (k ? 1 : 0);
  return Integer(k) * hi * hi + Integer(m - k) * lo * lo;
}

/// Minimum number of erring ordered message pairs of a deterministic keyless
/// one-sided strategy: balanced_square_sum(n, m) - n.
inline Integer min_error_mass(std::size_t n, std::size_t m) {
  return balanced_square_sum(n, m) - Integer(n);
}

/// Minimum achievable worst-case error of a one-sided classical strategy with
/// shared randomness.  0 when n <= m; 0 for n = 1 (no unequal pairs).
inline Rational classical_bound(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("classical_bound needs n, m >= 1");
  if (n <= m) return 0;
  const Integer pairs = Integer(n) * Integer(n) - Integer(n);
  return Rational(min_error_mass(n, m), pairs);
}

/// Probability that two fixed distinct messages share a group of a uniformly
/// random balanced partition, counted group by group.
inline Rational exact_permuted_error(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("exact_permuted_error needs n, m >= 1");
  if (n == 1) return 0;
  const std::size_t k = n % m;
  const Integer lo(n / m);
  const Integer hi = lo + (k ? 1 : 0);
  const Integer same_group_pairs = Integer(k) * hi * (hi - 1) + Integer(m - k) * lo * (lo - 1);
  return Rational(same_group_pairs, Integer(n) * Integer(n - 1));
}

/// The grouping protocol run over m^2 groups (one per member of an orthonormal
/// unitary basis) instead of m.
inline Rational semiclassical_bound(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("semiclassical_bound needs n, m >= 1");
  return classical_bound(n, m * m);
}

/// Keyless deterministic strategy: both parties send x mod m, referee accepts
/// iff the fingerprints agree.
inline StrategyTriple grouping_strategy(std::size_t n, std::size_t m) {
  auto g = GroupAssignment::balanced(n, m);
  auto alice = PartyStrategy::from_assignments(m, {g.groups});
  auto bob = alice;
  return StrategyTriple(ProtocolParams::symmetric(n, m), std::move(alice), std::move(bob),
                        RefereeRule::equality(m, m), SharedKeyDistribution::single());
}

/// Group of message x after relabeling by `perm`.
inline std::size_t permuted_group(const PermutationKey& perm, std::size_t x, std::size_t m) {
  return perm(x) % m;
}

/// Balanced grouping applied after a uniformly random shared relabeling of the
/// messages; one key per permutation, keys ranked by Lehmer code.  Keys are
/// materialized for n <= 8 and generated on demand for 8 < n <= 20.
inline StrategyTriple permuted_grouping(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("permuted_grouping needs n, m >= 1");
  const std::uint64_t keys = factorial(n);
  PartyStrategy party = [&] {
    if (n <= kEnumeratedPermutationLimit) {
      std::vector<std::vector<std::size_t>> rows;
      rows.reserve(keys);
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      // std::next_permutation walks lexicographic order, matching the rank.
      do {
        std::vector<std::size_t> row(n);
        for (std::size_t x = 0; x < n; ++x) row[x] = perm[x] % m;
        rows.push_back(std::move(row));
      } while (std::next_permutation(perm.begin(), perm.end()));
      return PartyStrategy::from_assignments(m, std::move(rows));
    }
    return PartyStrategy::lazy(n, m, keys, [n, m](std::uint64_t key, std::size_t x) {
      return permuted_group(PermutationKey::from_rank(n, key), x, m);
    });
  }();
  return StrategyTriple(ProtocolParams::symmetric(n, m), party, party, RefereeRule::equality(m, m),
                        SharedKeyDistribution::uniform(keys));
}

/// Number of distinct unlabeled balanced partitions of n messages into m groups:
/// n! / ((ceil!)^k (floor!)^(m-k) k! (m-k)!) for n >= m, and 1 for n < m.
inline Integer distinct_balanced_partitions(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("needs n, m >= 1");
  if (n < m) return 1;
  auto fact = [](std::size_t v) {
    Integer f = 1;
    for (std::size_t i = 2; i <= v; ++i) f *= i;
    return f;
  };
  const std::size_t k = n % m;
  const std::size_t lo = n / m;
  Integer den = fact(k) * fact(m - k);
  for (std::size_t i = 0; i < k; ++i) den *= fact(lo + 1);
  for (std::size_t i = 0; i < m - k; ++i) den *= fact(lo);
  return fact(n) / den;
}

/// Permuted grouping with repeated partitions merged: one key per distinct
/// set partition the n! relabelings induce, weighted by how many relabelings
/// produce it.  Fingerprints are relabeled by first occurrence, which the
/// equality referee does not see.  n <= 8.
inline StrategyTriple partition_grouping(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("partition_grouping needs n, m >= 1");
  if (n > kEnumeratedPermutationLimit) {
    throw BudgetExceeded("partition key space is built by enumerating n! relabelings; n <= 8 supported",
                         static_cast<double>(n));
  }
  std::map<std::vector<std::size_t>, std::uint64_t> multiplicity;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    std::vector<std::size_t> relabel(m, m);
    std::vector<std::size_t> canonical(n);
    std::size_t next = 0;
    for (std::size_t x = 0; x < n; ++x) {
      std::size_t g = perm[x] % m;
      if (relabel[g] == m) relabel[g] = next++;
      canonical[x] = relabel[g];
    }
    ++multiplicity[canonical];
  } while (std::next_permutation(perm.begin(), perm.end()));

  const Integer total(factorial(n));
  std::vector<std::vector<std::size_t>> rows;
  std::vector<Rational> weights;
  for (auto& [rows_key, count] : multiplicity) {
    rows.push_back(rows_key);
    weights.emplace_back(Integer(count), total);
  }
  auto party = PartyStrategy::from_assignments(m, std::move(rows));
  return StrategyTriple(ProtocolParams::symmetric(n, m), party, party, RefereeRule::equality(m, m),
                        SharedKeyDistribution::from_weights(std::move(weights)));
}

}  // namespace smpfp

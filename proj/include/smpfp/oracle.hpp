#pragma once

// Brute-force checks of the classical optimality argument: exhaustive
// minimization of the error mass over deterministic keyless strategies, and
// the overlap-matrix functional F(s) that the lower bound is built on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "smpfp/classical.hpp"
#include "smpfp/rational.hpp"

namespace smpfp {

/// s(a, b) = number of messages Alice maps to a and Bob maps to b.
class OverlapMatrix {
 public:
  OverlapMatrix(std::size_t m_alice, std::size_t m_bob) : rows_(m_alice), cols_(m_bob), data_(m_alice * m_bob, 0) {
    if (m_alice < 1 || m_bob < 1) throw InvalidArgument("overlap matrix must be non-empty");
  }

  OverlapMatrix(std::size_t m_alice, std::size_t m_bob, std::vector<std::uint64_t> values)
      : rows_(m_alice), cols_(m_bob), data_(std::move(values)) {
    if (m_alice < 1 || m_bob < 1 || data_.size() != m_alice * m_bob) {
      throw InvalidArgument("overlap matrix shape mismatch");
    }
  }

  static OverlapMatrix from_assignments(const GroupAssignment& fp, const GroupAssignment& fq) {
    fp.validate();
    fq.validate();
    if (fp.messages() != fq.messages()) throw InvalidArgument("assignments cover different message counts");
    OverlapMatrix s(fp.alphabet, fq.alphabet);
    for (std::size_t x = 0; x < fp.messages(); ++x) ++s(fp.groups[x], fq.groups[x]);
    return s;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint64_t& operator()(std::size_t a, std::size_t b) { return data_[a * cols_ + b]; }
  std::uint64_t operator()(std::size_t a, std::size_t b) const { return data_[a * cols_ + b]; }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto v : data_) t += v;
    return t;
  }
  std::uint64_t row_sum(std::size_t a) const {
    std::uint64_t t = 0;
    for (std::size_t b = 0; b < cols_; ++b) t += (*this)(a, b);
    return t;
  }
  std::uint64_t col_sum(std::size_t b) const {
    std::uint64_t t = 0;
    for (std::size_t a = 0; a < rows_; ++a) t += (*this)(a, b);
    return t;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint64_t> data_;
};

/// F(s) = sum_{a,b,i,j} s(a,i) s(j,b) sgn(s(a,b)), summed literally.  O(m^4).
inline std::uint64_t f_functional_quadruple(const OverlapMatrix& s) {
  std::uint64_t total = 0;
  for (std::size_t a = 0; a < s.rows(); ++a) {
    for (std::size_t b = 0; b < s.cols(); ++b) {
      if (s(a, b) == 0) continue;  // sgn(0) = 0
      for (std::size_t i = 0; i < s.cols(); ++i) {
        for (std::size_t j = 0; j < s.rows(); ++j) total += s(a, i) * s(j, b);
      }
    }
  }
  return total;
}

/// Same functional as sum_{a,b} sgn(s(a,b)) * rowsum(a) * colsum(b).
inline std::uint64_t f_functional(const OverlapMatrix& s) {
  std::vector<std::uint64_t> rows(s.rows()), cols(s.cols());
  for (std::size_t a = 0; a < s.rows(); ++a) rows[a] = s.row_sum(a);
  for (std::size_t b = 0; b < s.cols(); ++b) cols[b] = s.col_sum(b);
  std::uint64_t total = 0;
  for (std::size_t a = 0; a < s.rows(); ++a) {
    for (std::size_t b = 0; b < s.cols(); ++b) {
      if (s(a, b) != 0) total += rows[a] * cols[b];
    }
  }
  return total;
}

/// Error mass of the keyless deterministic strategy (fp, fq) under the least
/// accepting one-sided referee r(a,b) = sgn(s(a,b)): the number of unequal
/// ordered pairs (x, y) with s(fp(x), fq(y)) > 0.
inline std::int64_t ne_of_deterministic(const GroupAssignment& fp, const GroupAssignment& fq) {
  const auto s = OverlapMatrix::from_assignments(fp, fq);
  std::int64_t ne = 0;
  for (std::size_t a = 0; a < s.rows(); ++a) {
    for (std::size_t b = 0; b < s.cols(); ++b) {
      if (s(a, b) == 0) continue;
      const auto d = static_cast<std::int64_t>(s.row_sum(a) * s.col_sum(b)) - static_cast<std::int64_t>(s(a, b));
      ne += d;
    }
  }
  return ne;
}

/// Minimum of sum_a s(a,a)^2 over nonnegative integer diagonals with total n,
/// found by adding messages one at a time to the currently smallest group.
inline Integer min_f_over_diagonal(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("min_f_over_diagonal needs n, m >= 1");
  std::vector<std::size_t> diag(m, 0);
  for (std::size_t x = 0; x < n; ++x) ++*std::min_element(diag.begin(), diag.end());
  Integer total = 0;
  for (auto v : diag) total += Integer(v) * Integer(v);
  return total;
}

/// Collapses s onto the diagonal (s'(a,a) = row sum a) and checks F(s') <= F(s).
inline bool verify_diagonal_dominance(const OverlapMatrix& s) {
  OverlapMatrix diag(s.rows(), s.rows());
  for (std::size_t a = 0; a < s.rows(); ++a) diag(a, a) = s.row_sum(a);
  return f_functional(diag) <= f_functional(s);
}

struct OracleOptions {
  /// Maximum number of (Alice, Bob) assignment pairs to evaluate.
  double budget = 1e9;
  /// Scan only Alice assignments whose labels appear in first-occurrence
  /// order.  Cuts roughly m_alice! from the scan; off by default.
  bool prune_alice_relabelings = false;
  /// Witnesses kept in the report (the first ones in scan order).
  std::size_t max_witnesses = 64;
  /// Worker threads; 0 means hardware concurrency.
  unsigned threads = 0;
};

struct WitnessPair {
  GroupAssignment alice;
  GroupAssignment bob;
};

struct OracleReport {
  std::size_t n = 0;
  std::size_t m_alice = 0;
  std::size_t m_bob = 0;
  std::int64_t min_ne = 0;
  std::vector<WitnessPair> witnesses;
  /// Number of scanned pairs attaining min_ne (witnesses is truncated).
  std::uint64_t witness_count = 0;
  std::uint64_t strategies_scanned = 0;
  std::int64_t bound_value = 0;
  bool matches_bound = false;
  bool pruned = false;
};

/// Number of (Alice, Bob) assignment pairs an unpruned scan evaluates.
inline double exhaustive_scan_size(std::size_t n, std::size_t m_alice, std::size_t m_bob) {
  return std::pow(static_cast<double>(m_alice), static_cast<double>(n)) *
         std::pow(static_cast<double>(m_bob), static_cast<double>(n));
}

namespace detail {

// Assignment index -> fingerprints, message n-1 varying fastest (odometer).
inline void decode_assignment(std::uint64_t index, std::size_t m, std::vector<std::size_t>& out) {
  for (std::size_t x = out.size(); x-- > 0;) {
    out[x] = static_cast<std::size_t>(index % m);
    index /= m;
  }
}

inline bool is_first_occurrence_ordered(const std::vector<std::size_t>& groups) {
  std::size_t next = 0;
  for (auto g : groups) {
    if (g > next) return false;
    if (g == next) ++next;
  }
  return true;
}

struct ChunkResult {
  std::int64_t min_ne = std::numeric_limits<std::int64_t>::max();
  std::uint64_t count = 0;
  std::uint64_t scanned = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> witnesses;
};

}  // namespace detail

inline OracleReport exhaustive_min_ne(std::size_t n, std::size_t m_alice, std::size_t m_bob,
                                      const OracleOptions& options = {}) {
  if (n < 1 || m_alice < 1 || m_bob < 1) throw InvalidArgument("exhaustive_min_ne needs n, m_alice, m_bob >= 1");
  if (n > 64) throw InvalidArgument("exhaustive_min_ne supports n <= 64");
  const double estimate = exhaustive_scan_size(n, m_alice, m_bob);
  if (!(estimate <= options.budget)) {
    throw BudgetExceeded("exhaustive scan needs " + std::to_string(estimate) + " pair evaluations, budget is " +
                             std::to_string(options.budget),
                         estimate);
  }
  std::uint64_t alice_total = 1, bob_total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    alice_total *= m_alice;
    bob_total *= m_bob;
  }
  constexpr std::uint64_t kMaxBobTable = std::uint64_t{1} << 24;
  if (bob_total > kMaxBobTable) {
    throw BudgetExceeded("Bob's assignment table would hold " + std::to_string(bob_total) + " entries",
                         static_cast<double>(bob_total));
  }

  // Per Bob assignment: message bitmask and size of every fingerprint group.
  std::vector<std::uint64_t> bob_mask(bob_total * m_bob, 0);
  std::vector<std::uint64_t> bob_size(bob_total * m_bob, 0);
  {
    std::vector<std::size_t> groups(n);
    for (std::uint64_t j = 0; j < bob_total; ++j) {
      detail::decode_assignment(j, m_bob, groups);
      for (std::size_t x = 0; x < n; ++x) {
        bob_mask[j * m_bob + groups[x]] |= std::uint64_t{1} << x;
        ++bob_size[j * m_bob + groups[x]];
      }
    }
  }

  auto scan = [&](std::uint64_t begin, std::uint64_t end) {
    detail::ChunkResult res;
    std::vector<std::size_t> groups(n);
    std::vector<std::uint64_t> amask(m_alice), asize(m_alice);
    const auto n_signed = static_cast<std::int64_t>(n);
    for (std::uint64_t i = begin; i < end; ++i) {
      detail::decode_assignment(i, m_alice, groups);
      if (options.prune_alice_relabelings && !detail::is_first_occurrence_ordered(groups)) continue;
      std::fill(amask.begin(), amask.end(), 0);
      std::fill(asize.begin(), asize.end(), 0);
      for (std::size_t x = 0; x < n; ++x) {
        amask[groups[x]] |= std::uint64_t{1} << x;
        ++asize[groups[x]];
      }
      for (std::uint64_t j = 0; j < bob_total; ++j) {
        const std::uint64_t* bm = &bob_mask[j * m_bob];
        const std::uint64_t* bs = &bob_size[j * m_bob];
        std::uint64_t f = 0;
        for (std::size_t a = 0; a < m_alice; ++a) {
          if (asize[a] == 0) continue;
          std::uint64_t reach = 0;
          for (std::size_t b = 0; b < m_bob; ++b) reach += (amask[a] & bm[b]) ? bs[b] : 0;
          f += asize[a] * reach;
        }
        const auto ne = static_cast<std::int64_t>(f) - n_signed;
        ++res.scanned;
        if (ne < res.min_ne) {
          res.min_ne = ne;
          res.count = 0;
          res.witnesses.clear();
        }
        if (ne == res.min_ne) {
          ++res.count;
          if (res.witnesses.size() < options.max_witnesses) res.witnesses.emplace_back(i, j);
        }
      }
    }
    return res;
  };

  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, alice_total));
  std::vector<detail::ChunkResult> chunks(workers);
  if (workers == 1) {
    chunks[0] = scan(0, alice_total);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = alice_total * w / workers;
      const std::uint64_t end = alice_total * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] { chunks[w] = scan(begin, end); });
    }
    for (auto& t : pool) t.join();
  }

  OracleReport report;
  report.n = n;
  report.m_alice = m_alice;
  report.m_bob = m_bob;
  report.pruned = options.prune_alice_relabelings;
  report.min_ne = std::numeric_limits<std::int64_t>::max();
  for (const auto& c : chunks) {
    report.strategies_scanned += c.scanned;
    report.min_ne = std::min(report.min_ne, c.min_ne);
  }
  for (const auto& c : chunks) {
    if (c.min_ne != report.min_ne) continue;
    report.witness_count += c.count;
    for (const auto& [i, j] : c.witnesses) {
      if (report.witnesses.size() >= options.max_witnesses) break;
      WitnessPair w{GroupAssignment{std::vector<std::size_t>(n), m_alice},
                    GroupAssignment{std::vector<std::size_t>(n), m_bob}};
      detail::decode_assignment(i, m_alice, w.alice.groups);
      detail::decode_assignment(j, m_bob, w.bob.groups);
      report.witnesses.push_back(std::move(w));
    }
  }
  report.bound_value = static_cast<std::int64_t>(min_error_mass(n, std::min(m_alice, m_bob)));
  report.matches_bound = report.min_ne == report.bound_value;
  return report;
}

}  // namespace smpfp

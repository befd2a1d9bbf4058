#pragma once

// Classical simultaneous-message strategies: Alice and Bob map their messages
// to fingerprints (possibly at random, possibly conditioned on a shared key),
// and the referee accepts a fingerprint pair with some probability.  Everything
// here is evaluated in exact rational arithmetic.
//
// Indices are 0-based throughout: messages in [0, n), fingerprints in
// [0, m_alice) / [0, m_bob), keys in [0, K).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smpfp/rational.hpp"

namespace smpfp {

struct ProtocolParams {
  std::size_t n = 1;
  std::size_t m_alice = 1;
  std::size_t m_bob = 1;

  static ProtocolParams symmetric(std::size_t n, std::size_t m) { return {n, m, m}; }

  void validate() const {
    if (n < 1 || m_alice < 1 || m_bob < 1) {
      throw InvalidArgument("protocol parameters must satisfy n, m_alice, m_bob >= 1");
    }
  }

  friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

/// Distribution of the shared key.  Either an explicit finite weight vector or
/// the uniform distribution over K keys (stored without materializing weights).
class SharedKeyDistribution {
 public:
  static SharedKeyDistribution uniform(std::uint64_t keys) {
    if (keys == 0) throw InvalidArgument("key distribution needs at least one key");
    SharedKeyDistribution d;
    d.uniform_count_ = keys;
    return d;
  }

  static SharedKeyDistribution single() { return uniform(1); }

  static SharedKeyDistribution from_weights(std::vector<Rational> weights) {
    if (weights.empty()) throw InvalidArgument("key distribution needs at least one key");
    Rational total = 0;
    for (const auto& w : weights) {
      if (w < 0) throw InvalidArgument("key weights must be nonnegative");
      total += w;
    }
    if (total != 1) throw InvalidArgument("key weights must sum to exactly 1, got " + to_string(total));
    SharedKeyDistribution d;
    d.weights_ = std::make_shared<const std::vector<Rational>>(std::move(weights));
    return d;
  }

  std::uint64_t size() const noexcept { return weights_ ? weights_->size() : uniform_count_; }
  bool is_uniform() const noexcept { return weights_ == nullptr; }

  Rational weight(std::uint64_t key) const {
    if (key >= size()) throw InvalidArgument("key index out of range");
    if (weights_) return (*weights_)[key];
    return Rational(1, Integer(uniform_count_));
  }

 private:
  SharedKeyDistribution() = default;

  std::shared_ptr<const std::vector<Rational>> weights_;
  std::uint64_t uniform_count_ = 1;
};

/// One nonzero entry of a fingerprinting row: fingerprint sent with probability.
struct Emission {
  std::size_t fingerprint;
  Rational probability;
};

/// Key-conditioned fingerprinting strategy of one party.  For every key there
/// is an n x m row-stochastic table; entry (x, a) is the probability of
/// sending fingerprint a on message x.
///
/// Three storage forms share one interface: explicit rational tables,
/// materialized deterministic assignments (one fingerprint per message per
/// key) and lazily generated deterministic assignments for key spaces too
/// large to store.  Instances are immutable and cheap to copy.
class PartyStrategy {
 public:
  using FingerprintFn = std::function<std::size_t(std::uint64_t key, std::size_t message)>;

  static PartyStrategy from_tables(std::vector<RationalMatrix> tables) {
    if (tables.empty()) throw InvalidArgument("strategy needs at least one key table");
    const std::size_t n = tables.front().rows();
    const std::size_t m = tables.front().cols();
    if (n < 1 || m < 1) throw InvalidArgument("strategy tables must be non-empty");
    bool deterministic = true;
    for (const auto& t : tables) {
      if (t.rows() != n || t.cols() != m) throw InvalidArgument("strategy tables differ in shape");
      for (std::size_t x = 0; x < n; ++x) {
        Rational row_sum = 0;
        for (std::size_t a = 0; a < m; ++a) {
          if (!in_unit_interval(t(x, a))) throw InvalidArgument("strategy entry outside [0,1]");
          row_sum += t(x, a);
        }
        if (row_sum != 1) {
          throw InvalidArgument("strategy row " + std::to_string(x) + " sums to " + to_string(row_sum));
        }
      }
      deterministic = deterministic && t.all_binary();
    }
    PartyStrategy s(n, m, tables.size(), deterministic);
    s.source_ = std::make_shared<const Source>(Tables{std::move(tables)});
    return s;
  }

  static PartyStrategy from_assignments(std::size_t fingerprints,
                                        std::vector<std::vector<std::size_t>> assignments) {
    if (assignments.empty()) throw InvalidArgument("strategy needs at least one key assignment");
    if (fingerprints < 1) throw InvalidArgument("fingerprint alphabet must be non-empty");
    const std::size_t n = assignments.front().size();
    if (n < 1) throw InvalidArgument("assignment must cover at least one message");
    for (const auto& row : assignments) {
      if (row.size() != n) throw InvalidArgument("assignments differ in length");
      for (auto a : row) {
        if (a >= fingerprints) throw InvalidArgument("assignment uses fingerprint outside alphabet");
      }
    }
    PartyStrategy s(n, fingerprints, assignments.size(), true);
    s.source_ = std::make_shared<const Source>(Assignments{std::move(assignments)});
    return s;
  }

  /// The generator must return a fingerprint in [0, fingerprints) and be a
  /// pure function of (key, message).
  static PartyStrategy lazy(std::size_t messages, std::size_t fingerprints, std::uint64_t keys,
                            FingerprintFn fn) {
    if (messages < 1 || fingerprints < 1 || keys < 1) {
      throw InvalidArgument("lazy strategy needs n, m, K >= 1");
    }
    PartyStrategy s(messages, fingerprints, keys, true);
    s.source_ = std::make_shared<const Source>(Lazy{std::move(fn)});
    return s;
  }

  std::size_t messages() const noexcept { return n_; }
  std::size_t fingerprints() const noexcept { return m_; }
  std::uint64_t key_count() const noexcept { return keys_; }
  bool is_deterministic() const noexcept { return deterministic_; }
  bool is_lazy() const noexcept { return std::holds_alternative<Lazy>(*source_); }
  bool has_tables() const noexcept { return std::holds_alternative<Tables>(*source_); }

  /// Fingerprint sent on `message` under `key`; deterministic strategies only.
  std::size_t fingerprint(std::uint64_t key, std::size_t message) const {
    check(key, message);
    if (const auto* a = std::get_if<Assignments>(source_.get())) return a->rows[key][message];
    if (const auto* l = std::get_if<Lazy>(source_.get())) {
      std::size_t f = l->fn(key, message);
      if (f >= m_) throw InvalidArgument("lazy strategy generated fingerprint outside alphabet");
      return f;
    }
    const auto& t = std::get<Tables>(*source_).tables[key];
    for (std::size_t a = 0; a < m_; ++a) {
      if (t(message, a) == 1) return a;
    }
    throw InvalidArgument("fingerprint() called on a probabilistic row");
  }

  /// Nonzero entries of the table row for (key, message), in fingerprint order.
  std::vector<Emission> emissions(std::uint64_t key, std::size_t message) const {
    if (const auto* t = std::get_if<Tables>(source_.get())) {
      check(key, message);
      std::vector<Emission> out;
      const auto& table = t->tables[key];
      for (std::size_t a = 0; a < m_; ++a) {
        if (!is_zero(table(message, a))) out.push_back({a, table(message, a)});
      }
      return out;
    }
    return {{fingerprint(key, message), Rational(1)}};
  }

  RationalMatrix table(std::uint64_t key) const {
    if (const auto* t = std::get_if<Tables>(source_.get())) {
      check(key, 0);
      return t->tables[key];
    }
    RationalMatrix out(n_, m_);
    for (std::size_t x = 0; x < n_; ++x) out(x, fingerprint(key, x)) = 1;
    return out;
  }

 private:
  struct Tables {
    std::vector<RationalMatrix> tables;
  };
  struct Assignments {
    std::vector<std::vector<std::size_t>> rows;
  };
  struct Lazy {
    FingerprintFn fn;
  };
  using Source = std::variant<Tables, Assignments, Lazy>;

  PartyStrategy(std::size_t n, std::size_t m, std::uint64_t keys, bool deterministic)
      : n_(n), m_(m), keys_(keys), deterministic_(deterministic) {}

  void check(std::uint64_t key, std::size_t message) const {
    if (key >= keys_) throw InvalidArgument("key index out of range");
    if (message >= n_) throw InvalidArgument("message index out of range");
  }

  std::size_t n_;
  std::size_t m_;
  std::uint64_t keys_;
  bool deterministic_;
  std::shared_ptr<const Source> source_;
};

/// Referee acceptance rule: accept(a, b) is the probability of outputting z = 1
/// on fingerprint pair (a, b).
class RefereeRule {
 public:
  explicit RefereeRule(RationalMatrix accept) : accept_(std::move(accept)) {
    if (accept_.rows() < 1 || accept_.cols() < 1) throw InvalidArgument("referee rule must be non-empty");
    for (const auto& v : accept_.data()) {
      if (!in_unit_interval(v)) throw InvalidArgument("referee entry outside [0,1]");
    }
  }

  /// r(a, b) = delta(a, b) on an m_alice x m_bob grid.
  static RefereeRule equality(std::size_t m_alice, std::size_t m_bob) {
    RationalMatrix r(m_alice, m_bob);
    for (std::size_t a = 0; a < std::min(m_alice, m_bob); ++a) r(a, a) = 1;
    return RefereeRule(std::move(r));
  }

  static RefereeRule constant(std::size_t m_alice, std::size_t m_bob, const Rational& value) {
    return RefereeRule(RationalMatrix(m_alice, m_bob, value));
  }

  const Rational& operator()(std::size_t a, std::size_t b) const { return accept_(a, b); }
  std::size_t m_alice() const noexcept { return accept_.rows(); }
  std::size_t m_bob() const noexcept { return accept_.cols(); }
  bool is_deterministic() const { return accept_.all_binary(); }
  const RationalMatrix& matrix() const noexcept { return accept_; }

  friend bool operator==(const RefereeRule&, const RefereeRule&) = default;

 private:
  RationalMatrix accept_;
};

/// The full (p, q, r) strategy with its shared-key distribution.
class StrategyTriple {
 public:
  StrategyTriple(ProtocolParams params, PartyStrategy alice, PartyStrategy bob, RefereeRule referee,
                 SharedKeyDistribution keys)
      : params_(params),
        alice_(std::move(alice)),
        bob_(std::move(bob)),
        referee_(std::move(referee)),
        keys_(std::move(keys)) {
    params_.validate();
    if (alice_.messages() != params_.n || bob_.messages() != params_.n) {
      throw InvalidArgument("strategy message count does not match n");
    }
    if (alice_.fingerprints() != params_.m_alice || bob_.fingerprints() != params_.m_bob) {
      throw InvalidArgument("strategy alphabet does not match m_alice/m_bob");
    }
    if (referee_.m_alice() != params_.m_alice || referee_.m_bob() != params_.m_bob) {
      throw InvalidArgument("referee rule shape does not match alphabets");
    }
    if (alice_.key_count() != keys_.size() || bob_.key_count() != keys_.size()) {
      throw InvalidArgument("alice, bob and the key distribution disagree on the key count");
    }
  }

  const ProtocolParams& params() const noexcept { return params_; }
  const PartyStrategy& alice() const noexcept { return alice_; }
  const PartyStrategy& bob() const noexcept { return bob_; }
  const RefereeRule& referee() const noexcept { return referee_; }
  const SharedKeyDistribution& keys() const noexcept { return keys_; }

  bool is_deterministic() const {
    return alice_.is_deterministic() && bob_.is_deterministic() && referee_.is_deterministic();
  }

  StrategyTriple with_referee(RefereeRule referee) const {
    return StrategyTriple(params_, alice_, bob_, std::move(referee), keys_);
  }

 private:
  ProtocolParams params_;
  PartyStrategy alice_;
  PartyStrategy bob_;
  RefereeRule referee_;
  SharedKeyDistribution keys_;
};

/// Exact error statistics of a strategy.  pe(x,x) = 1 - p1(x,x) and
/// pe(x,y) = p1(x,y) otherwise; wce is the maximum of pe, ne its sum.
struct ErrorProfile {
  RationalMatrix p1;
  RationalMatrix pe;
  Rational wce;
  Rational ne;
};

/// Upper bound on the number of keys the exact evaluators will enumerate.
/// The default admits the full 8! permutation key space.
struct EvalLimits {
  std::uint64_t max_keys = 40320;
};

namespace detail {

inline void check_key_budget(const StrategyTriple& t, const EvalLimits& limits) {
  if (t.keys().size() > limits.max_keys) {
    throw BudgetExceeded("exact evaluation would enumerate " + std::to_string(t.keys().size()) +
                             " keys (limit " + std::to_string(limits.max_keys) + ")",
                         static_cast<double>(t.keys().size()));
  }
}

// Sums, over keys, sigma(key) * sum_{a,b} p(a|x) q(b|y) r(a,b) for the
// requested message pairs.  For uniform keys the 1/K factor is applied once at
// the end so the inner loop only adds referee entries.
template <typename PairList>
RationalMatrix accumulate_acceptance(const StrategyTriple& t, const PairList& pairs,
                                     const EvalLimits& limits) {
  check_key_budget(t, limits);
  const std::size_t n = t.params().n;
  const auto& keys = t.keys();
  const bool uniform = keys.is_uniform();
  const auto& r = t.referee();
  RationalMatrix acc(n, n);

  std::vector<std::vector<Emission>> alice_rows(n), bob_rows(n);
  for (std::uint64_t key = 0; key < keys.size(); ++key) {
    Rational w = uniform ? Rational(1) : keys.weight(key);
    if (is_zero(w)) continue;
    for (std::size_t x = 0; x < n; ++x) {
      alice_rows[x] = t.alice().emissions(key, x);
      bob_rows[x] = t.bob().emissions(key, x);
    }
    for (const auto& [x, y] : pairs) {
      const auto& ea = alice_rows[x];
      const auto& eb = bob_rows[y];
      if (ea.size() == 1 && eb.size() == 1 && is_one(ea[0].probability) && is_one(eb[0].probability)) {
        const Rational& v = r(ea[0].fingerprint, eb[0].fingerprint);
        if (is_zero(v)) continue;
        if (uniform) {
          acc(x, y) += v;
        } else {
          acc(x, y) += w * v;
        }
        continue;
      }
      Rational inner = 0;
      for (const auto& ha : ea) {
        for (const auto& hb : eb) {
          const Rational& v = r(ha.fingerprint, hb.fingerprint);
          if (!is_zero(v)) inner += ha.probability * hb.probability * v;
        }
      }
      if (!is_zero(inner)) acc(x, y) += w * inner;
    }
  }
  if (uniform && keys.size() != 1) {
    const Rational inv(1, Integer(keys.size()));
    for (const auto& [x, y] : pairs) acc(x, y) *= inv;
  }
  return acc;
}

}  // namespace detail

/// P1(x, y): probability that the referee outputs 1 when Alice holds x and Bob y.
inline Rational acceptance_probability(const StrategyTriple& t, std::size_t x, std::size_t y,
                                       const EvalLimits& limits = {}) {
  if (x >= t.params().n || y >= t.params().n) throw InvalidArgument("message index out of range");
  std::vector<std::pair<std::size_t, std::size_t>> pairs{{x, y}};
  return detail::accumulate_acceptance(t, pairs, limits)(x, y);
}

inline ErrorProfile error_profile(const StrategyTriple& t, const EvalLimits& limits = {}) {
  const std::size_t n = t.params().n;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) pairs.emplace_back(x, y);
  }
  ErrorProfile out;
  out.p1 = detail::accumulate_acceptance(t, pairs, limits);
  out.pe = RationalMatrix(n, n);
  out.wce = 0;
  out.ne = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      out.pe(x, y) = (x == y) ? Rational(1 - out.p1(x, y)) : out.p1(x, y);
      out.ne += out.pe(x, y);
      if (out.pe(x, y) > out.wce) out.wce = out.pe(x, y);
    }
  }
  return out;
}

/// True iff P1(x, x) = 1 exactly for every message.
inline bool is_one_sided(const StrategyTriple& t, const EvalLimits& limits = {}) {
  const std::size_t n = t.params().n;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t x = 0; x < n; ++x) pairs.emplace_back(x, x);
  auto acc = detail::accumulate_acceptance(t, pairs, limits);
  for (std::size_t x = 0; x < n; ++x) {
    if (!is_one(acc(x, x))) return false;
  }
  return true;
}

/// The least accepting one-sided referee for fixed (p, q, sigma): accept (a, b)
/// exactly when some equal message pair can produce it under a key of
/// positive weight.
inline RefereeRule derive_referee(const PartyStrategy& alice, const PartyStrategy& bob,
                                  const SharedKeyDistribution& keys, const EvalLimits& limits = {}) {
  if (alice.messages() != bob.messages()) throw InvalidArgument("alice and bob disagree on n");
  if (alice.key_count() != keys.size() || bob.key_count() != keys.size()) {
    throw InvalidArgument("strategies and key distribution disagree on the key count");
  }
  if (keys.size() > limits.max_keys) {
    throw BudgetExceeded("referee derivation would enumerate " + std::to_string(keys.size()) + " keys",
                         static_cast<double>(keys.size()));
  }
  RationalMatrix accept(alice.fingerprints(), bob.fingerprints());
  for (std::uint64_t key = 0; key < keys.size(); ++key) {
    if (is_zero(keys.weight(key))) continue;
    for (std::size_t x = 0; x < alice.messages(); ++x) {
      for (const auto& ea : alice.emissions(key, x)) {
        for (const auto& eb : bob.emissions(key, x)) accept(ea.fingerprint, eb.fingerprint) = 1;
      }
    }
  }
  return RefereeRule(std::move(accept));
}

}  // namespace smpfp

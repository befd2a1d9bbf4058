#pragma once

// Monte Carlo rounds of the fingerprinting game against a message supplier
// who picks (x, y) by one of several policies, reconciled with the exact
// error the chosen policy should produce.
//
// Round r draws from its own Philox stream (see RoundStream), so outcomes do
// not depend on execution order.  Classical rounds read fixed 64-bit slots of
// stream 0: x, y, key, alice, bob, referee.  Quantum rounds read x, y and the
// measurement from slots 0..2 of stream 0, and the shared permutation
// (Fisher-Yates, i = n-1 down to 1, j = below(i + 1)) from stream 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smpfp/classical.hpp"
#include "smpfp/philox.hpp"
#include "smpfp/quantum.hpp"
#include "smpfp/rational.hpp"
#include "smpfp/strategy.hpp"

namespace smpfp {

struct AdversaryModel {
  enum class Mode { kWorstPair, kUniformUnequal, kUniformAll, kEqualOnly, kScripted };

  Mode mode = Mode::kWorstPair;
  std::vector<std::pair<std::size_t, std::size_t>> script;

  static AdversaryModel worst_pair() { return {Mode::kWorstPair, {}}; }
  static AdversaryModel uniform_unequal() { return {Mode::kUniformUnequal, {}}; }
  static AdversaryModel uniform_all() { return {Mode::kUniformAll, {}}; }
  static AdversaryModel equal_only() { return {Mode::kEqualOnly, {}}; }
  static AdversaryModel scripted(std::vector<std::pair<std::size_t, std::size_t>> pairs) {
    if (pairs.empty()) throw InvalidArgument("scripted adversary needs at least one pair");
    return {Mode::kScripted, std::move(pairs)};
  }

  std::string name() const {
    switch (mode) {
      case Mode::kWorstPair: return "worst-pair";
      case Mode::kUniformUnequal: return "uniform-unequal";
      case Mode::kUniformAll: return "uniform-all";
      case Mode::kEqualOnly: return "equal-only";
      case Mode::kScripted: return "scripted";
    }
    return "unknown";
  }

  void validate(std::size_t n) const {
    if (mode == Mode::kUniformUnequal && n < 2) throw InvalidArgument("uniform-unequal adversary needs n >= 2");
    for (const auto& [x, y] : script) {
      if (x >= n || y >= n) throw InvalidArgument("scripted pair outside the message range");
    }
  }
};

struct RoundOutcome {
  std::uint64_t round = 0;
  /// Classical: shared key index.  Quantum: Lehmer rank of the permutation
  /// when n <= 20.
  std::optional<std::uint64_t> key;
  std::vector<std::size_t> permutation;  // quantum rounds only
  std::size_t x = 0;
  std::size_t y = 0;
  std::optional<std::size_t> a;  // classical fingerprints
  std::optional<std::size_t> b;
  std::optional<double> accept_probability;  // quantum outcome-1 probability
  int z = 0;
  bool correct = false;
};

inline constexpr double kHoeffdingDelta = 1e-6;

/// sqrt(ln(2/delta) / (2 rounds))
inline double hoeffding_radius(std::uint64_t rounds, double delta = kHoeffdingDelta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(rounds)));
}

struct SimulationReport {
  std::string protocol;
  std::string adversary;
  std::uint64_t rounds = 0;
  std::uint64_t errors = 0;
  std::uint64_t equal_rounds = 0;
  std::uint64_t false_negatives = 0;
  Rational empirical_error;
  Rational exact_target;
  double deviation = 0.0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  bool within_bound = false;
};

struct SimOptions {
  EvalLimits limits{};
  RoundEvaluation quantum_evaluation = RoundEvaluation::kTraceFormula;
  std::function<void(const RoundOutcome&)> observer;
};

namespace detail {

// Message pair for round r; consumes slots 0 and 1 of the stream.
inline std::pair<std::size_t, std::size_t> draw_pair(const AdversaryModel& adv, std::size_t n,
                                                     std::pair<std::size_t, std::size_t> worst, std::uint64_t round,
                                                     RoundStream& rng) {
  const std::uint64_t w0 = rng.next_u64();
  const std::uint64_t w1 = rng.next_u64();
  auto below = [](std::uint64_t word, std::uint64_t bound) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(word) * bound) >> 64);
  };
  switch (adv.mode) {
    case AdversaryModel::Mode::kWorstPair: return worst;
    case AdversaryModel::Mode::kUniformUnequal: {
      const std::size_t x = below(w0, n);
      std::size_t y = below(w1, n - 1);
      if (y >= x) ++y;
      return {x, y};
    }
    case AdversaryModel::Mode::kUniformAll: return {below(w0, n), below(w1, n)};
    case AdversaryModel::Mode::kEqualOnly: {
      const std::size_t x = below(w0, n);
      return {x, x};
    }
    case AdversaryModel::Mode::kScripted: return adv.script[round % adv.script.size()];
  }
  return worst;
}

// Exact expected error of the adversary policy, given per-pair errors.
template <typename PairError>
Rational adversary_target(const AdversaryModel& adv, std::size_t n, std::uint64_t rounds, PairError&& pe,
                          const Rational& worst_value) {
  switch (adv.mode) {
    case AdversaryModel::Mode::kWorstPair: return worst_value;
    case AdversaryModel::Mode::kUniformUnequal: {
      Rational s = 0;
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          if (x != y) s += pe(x, y);
        }
      }
      return s / Rational(Integer(n) * Integer(n - 1));
    }
    case AdversaryModel::Mode::kUniformAll: {
      Rational s = 0;
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) s += pe(x, y);
      }
      return s / Rational(Integer(n) * Integer(n));
    }
    case AdversaryModel::Mode::kEqualOnly: {
      Rational s = 0;
      for (std::size_t x = 0; x < n; ++x) s += pe(x, x);
      return s / Rational(Integer(n));
    }
    case AdversaryModel::Mode::kScripted: {
      const std::uint64_t len = adv.script.size();
      const std::uint64_t full = rounds / len;
      const std::uint64_t rest = rounds % len;
      Rational s = 0;
      for (std::uint64_t i = 0; i < len; ++i) {
        const auto& [x, y] = adv.script[i];
        s += pe(x, y) * Integer(full + (i < rest ? 1 : 0));
      }
      return s / Rational(Integer(rounds));
    }
  }
  return worst_value;
}

inline void finish_report(SimulationReport& r) {
  r.empirical_error = Rational(Integer(r.errors), Integer(r.rounds));
  r.deviation = std::abs(to_double(r.empirical_error - r.exact_target));
  r.radius = hoeffding_radius(r.rounds);
  r.within_bound = r.deviation <= r.radius;
}

// Index i with cumulative[i-1] <= u < cumulative[i]; the last positive entry
// absorbs rounding at the top.
inline std::size_t sample_cumulative(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) {
    std::size_t i = cumulative.size() - 1;
    while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;
    return i;
  }
  return static_cast<std::size_t>(it - cumulative.begin());
}

inline std::size_t sample_emission(const std::vector<Emission>& em, double u) {
  if (em.size() == 1) return em.front().fingerprint;
  std::vector<double> cum;
  double acc = 0.0;
  for (const auto& e : em) cum.push_back(acc += to_double(e.probability));
  return em[sample_cumulative(cum, u)].fingerprint;
}

inline int sample_bit(const Rational& p, double u) {
  if (is_zero(p)) return 0;
  if (is_one(p)) return 1;
  return u < to_double(p) ? 1 : 0;
}

}  // namespace detail

/// Simulates `rounds` rounds of a classical strategy.  The exact target comes
/// from error_profile, so the key space must fit options.limits.
inline SimulationReport run_classical(const StrategyTriple& triple, const AdversaryModel& adversary,
                                      std::uint64_t rounds, std::uint64_t seed, const SimOptions& options = {}) {
  if (rounds < 1) throw InvalidArgument("simulation needs at least one round");
  const std::size_t n = triple.params().n;
  adversary.validate(n);
  const auto profile = error_profile(triple, options.limits);

  std::pair<std::size_t, std::size_t> worst{0, 0};
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (profile.pe(x, y) > profile.pe(worst.first, worst.second)) worst = {x, y};
    }
  }

  SimulationReport report;
  report.protocol = "classical";
  report.adversary = adversary.name();
  report.rounds = rounds;
  report.seed = seed;
  report.exact_target = detail::adversary_target(
      adversary, n, rounds, [&](std::size_t x, std::size_t y) { return profile.pe(x, y); }, profile.wce);

  const auto& keys = triple.keys();
  std::vector<double> key_cdf;
  if (!keys.is_uniform()) {
    double acc = 0.0;
    for (std::uint64_t k = 0; k < keys.size(); ++k) key_cdf.push_back(acc += to_double(keys.weight(k)));
  }

  for (std::uint64_t r = 0; r < rounds; ++r) {
    RoundStream rng(seed, r);
    RoundOutcome out;
    out.round = r;
    std::tie(out.x, out.y) = detail::draw_pair(adversary, n, worst, r, rng);
    const std::uint64_t key_word = rng.next_u64();
    const std::uint64_t key = keys.is_uniform()
                                  ? static_cast<std::uint64_t>((static_cast<unsigned __int128>(key_word) * keys.size()) >> 64)
                                  : detail::sample_cumulative(key_cdf, static_cast<double>(key_word >> 11) * 0x1.0p-53);
    out.key = key;
    out.a = detail::sample_emission(triple.alice().emissions(key, out.x), rng.uniform());
    out.b = detail::sample_emission(triple.bob().emissions(key, out.y), rng.uniform());
    out.z = detail::sample_bit(triple.referee()(*out.a, *out.b), rng.uniform());
    out.correct = (out.z == 1) == (out.x == out.y);
    if (!out.correct) ++report.errors;
    if (out.x == out.y) {
      ++report.equal_rounds;
      if (out.z == 0) ++report.false_negatives;
    }
    if (options.observer) options.observer(out);
  }
  detail::finish_report(report);
  return report;
}

/// Uniform permutation of [0, n) from stream 1 of the round.
inline PermutationKey draw_permutation(std::size_t n, std::uint64_t seed, std::uint64_t round) {
  RoundStream rng(seed, round, 1);
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) std::swap(p[i], p[static_cast<std::size_t>(rng.below(i + 1))]);
  return PermutationKey(std::move(p));
}

/// Unitaries used by the entangled protocols: the n-member frame when
/// n >= m^2, otherwise the first n members of the orthonormal basis.
inline UnitaryFrame protocol_frame(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw InvalidArgument("needs n, m >= 1");
  if (n >= m * m) return utof_frame(n, m);
  auto basis = utof_frame(m * m, m);
  basis.members.resize(n);
  basis.n = n;
  return basis;
}

/// Simulates the permuted frame protocol.  For n >= m^2 this is the tight
/// frame protocol; for n < m^2 the orthonormal-basis protocol, which never
/// errs.  The shared n!-dimensional entangled state is modeled by what the
/// parties measure from it: a uniformly distributed shared permutation.
inline SimulationReport run_quantum(std::size_t n, std::size_t m, const AdversaryModel& adversary,
                                    std::uint64_t rounds, std::uint64_t seed, const SimOptions& options = {}) {
  if (rounds < 1) throw InvalidArgument("simulation needs at least one round");
  adversary.validate(n);
  const auto frame = protocol_frame(n, m);
  // Every unequal pair has the same permutation-averaged acceptance, equal
  // pairs accept with certainty.
  const Rational unequal_error = n >= m * m ? expected_unequal_acceptance(n, m) : Rational(0);
  auto pe = [&](std::size_t x, std::size_t y) { return x == y ? Rational(0) : unequal_error; };
  std::pair<std::size_t, std::size_t> worst{0, 0};
  if (n >= 2 && unequal_error > 0) worst = {0, 1};

  SimulationReport report;
  report.protocol = n <= m * m ? "quantum-basis" : "quantum-frame";
  report.adversary = adversary.name();
  report.rounds = rounds;
  report.seed = seed;
  report.exact_target = detail::adversary_target(adversary, n, rounds, pe, pe(worst.first, worst.second));

  for (std::uint64_t r = 0; r < rounds; ++r) {
    RoundStream rng(seed, r);
    RoundOutcome out;
    out.round = r;
    std::tie(out.x, out.y) = detail::draw_pair(adversary, n, worst, r, rng);
    auto perm = draw_permutation(n, seed, r);
    double p = simulate_frame_round(frame, perm, out.x, out.y, options.quantum_evaluation);
    // Structural tolerance: values this close to 0 or 1 are exact in theory.
    if (p <= kStructuralTolerance) p = 0.0;
    if (p >= 1.0 - kStructuralTolerance) p = 1.0;
    out.accept_probability = p;
    out.z = rng.uniform() < p ? 1 : 0;
    if (n <= kMaxRankablePermutation) out.key = perm.rank();
    out.permutation = perm.values();
    out.correct = (out.z == 1) == (out.x == out.y);
    if (!out.correct) ++report.errors;
    if (out.x == out.y) {
      ++report.equal_rounds;
      if (out.z == 0) ++report.false_negatives;
    }
    if (options.observer) options.observer(out);
  }
  detail::finish_report(report);
  return report;
}

}  // namespace smpfp

// Acceptance gate.  Runs the nine end-to-end checks and prints one
// [PASS]/[FAIL] line per check; exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "smpfp/classical.hpp"
#include "smpfp/oracle.hpp"
#include "smpfp/quantum.hpp"
#include "smpfp/sim.hpp"
#include "test_support.hpp"

using namespace smpfp;

namespace {

constexpr double kEqualPairTolerance = 1e-12;
constexpr double kUnequalPairCeiling = 1e-20;
constexpr double kMeanAcceptanceTolerance = 1e-9;
constexpr double kFrameBoundTolerance = 1e-6;
constexpr double kOverlapTolerance = 1e-10;
constexpr int kRandomOperatorSets = 1000;
constexpr int kRandomUnitaryPairs = 1000;
constexpr std::uint64_t kMonteCarloRounds = 1000000;
constexpr std::uint64_t kMonteCarloSeed = 1;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

Outcome exhaustive_matches_bound() {
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  for (std::size_t m : {2, 3}) {
    for (std::size_t n = m; n <= 8; ++n) grid.emplace_back(n, m);
  }
  grid.emplace_back(9, 3);
  grid.emplace_back(6, 4);
  Outcome o;
  for (auto [n, m] : grid) {
    const auto r = exhaustive_min_ne(n, m, m);
    if (Integer(r.min_ne) != min_error_mass(n, m)) {
      fail(o, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " min_ne=" + std::to_string(r.min_ne));
    }
  }
  if (o.pass) o.detail = std::to_string(grid.size()) + " (n,m) cases equal the closed form";
  return o;
}

Outcome asymmetric_alphabets() {
  Outcome o;
  const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> cases{
      {4, 2, 3}, {4, 2, 4}, {5, 2, 5}, {5, 3, 4}};
  for (auto [n, ma, mb] : cases) {
    const auto r = exhaustive_min_ne(n, ma, mb);
    if (Integer(r.min_ne) != min_error_mass(n, std::min(ma, mb))) {
      fail(o, "n=" + std::to_string(n) + " mA=" + std::to_string(ma) + " mB=" + std::to_string(mb));
    }
  }
  if (o.pass) o.detail = "4 cases equal the bound at min(mA, mB)";
  return o;
}

Outcome permuted_strategy_exact() {
  Outcome o;
  int cases = 0;
  for (std::size_t n = 1; n <= 7; ++n) {
    for (std::size_t m = 1; m <= n; ++m) {
      const auto prof = error_profile(permuted_grouping(n, m));
      const auto target = classical_bound(n, m);
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          if (prof.pe(x, y) != (x == y ? Rational(0) : target)) {
            fail(o, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " pair " + std::to_string(x) + "," +
                        std::to_string(y) + " pe=" + to_string(prof.pe(x, y)));
          }
        }
      }
      ++cases;
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " (n,m) cases, n! keys each, exact";
  return o;
}

Outcome quantum_error_free() {
  Outcome o;
  double worst_equal = 0.0, worst_unequal = 0.0;
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{4, 2}, {9, 3}, {16, 4}}) {
    const auto v = basis_protocol_verdict(n, m);
    worst_equal = std::max(worst_equal, v.max_equal_deviation);
    worst_unequal = std::max(worst_unequal, v.max_unequal_acceptance);
    if (v.max_equal_deviation > kEqualPairTolerance || v.max_unequal_acceptance > kUnequalPairCeiling) {
      fail(o, "n=" + std::to_string(n) + " m=" + std::to_string(m));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |p(x,x)-1| = %.3g, max p(x,y) = %.3g", worst_equal, worst_unequal);
  if (o.pass) o.detail = buf;
  return o;
}

const std::vector<std::pair<std::size_t, std::size_t>> kFrameGrid{{8, 2}, {16, 2}, {12, 2}, {18, 3}, {27, 3}};

Outcome frame_error_matches() {
  Outcome o;
  double worst = 0.0;
  for (auto [n, m] : kFrameGrid) {
    const auto stats = frame_acceptance_stats(n, m);
    const double expected_mean = (static_cast<double>(n * n) / static_cast<double>(m * m) - static_cast<double>(n)) /
                                 static_cast<double>(n * n - n);
    const double error = (static_cast<double>(n) / static_cast<double>(m * m) - 1.0) / static_cast<double>(n - 1);
    const auto frame = utof_frame(n, m);
    double dev = std::abs(stats.mean_unequal_acceptance - expected_mean);
    for (auto [x, y] : {std::pair<std::size_t, std::size_t>{0, 1}, {n - 1, 0}, {2, n / 2}}) {
      dev = std::max(dev, std::abs(permutation_averaged_acceptance(frame, x, y) - error));
    }
    worst = std::max(worst, dev);
    if (dev > kMeanAcceptanceTolerance) fail(o, "n=" + std::to_string(n) + " m=" + std::to_string(m));
    if (n % (m * m) == 0 && frame_protocol_error(n, m) != semiclassical_bound(n, m)) {
      fail(o, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " differs from the grouped bound");
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "5 cases, max deviation %.3g, divisible cases equal the grouped bound", worst);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome frame_bound() {
  Outcome o;
  std::mt19937_64 rng(20261016);
  double slack = 1e300;
  long sets = 0;
  for (std::size_t m : {2, 3, 4}) {
    for (std::size_t n = m * m + 1; n <= 2 * m * m; ++n) {
      for (int i = 0; i < kRandomOperatorSets; ++i) {
        std::vector<ComplexMatrix> ops;
        ops.reserve(n);
        for (std::size_t x = 0; x < n; ++x) ops.push_back(fixtures::random_normalized_operator(m, rng));
        const double potential = fixtures::operator_frame_potential(ops);
        const double n2 = static_cast<double>(n * n);
        slack = std::min(slack, potential - n2);
        if (potential < n2 - kFrameBoundTolerance) fail(o, "random set below n^2 at m=" + std::to_string(m));
        ++sets;
      }
    }
  }
  double worst_rel = 0.0;
  for (auto [n, m] : kFrameGrid) {
    const double n2 = static_cast<double>(n * n);
    const double rel = std::abs(utof_frame(n, m).frame_potential() - n2) / n2;
    worst_rel = std::max(worst_rel, rel);
    if (rel > kFrameBoundTolerance) fail(o, "frame not tight at n=" + std::to_string(n));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%ld random sets, min slack %.3g; construction rel. error %.3g", sets, slack,
                worst_rel);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome trace_identity() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (std::size_t m : {2, 3, 4, 8}) {
    for (int i = 0; i < kRandomUnitaryPairs; ++i) {
      const auto a = fixtures::random_unitary(m, rng);
      const auto b = fixtures::random_unitary(m, rng);
      worst = std::max(worst, std::abs(entangled_overlap(a, b) - trace_overlap(a, b)));
    }
  }
  if (worst > kOverlapTolerance) fail(o, "max difference above tolerance");
  char buf[120];
  std::snprintf(buf, sizeof buf, "4000 unitary pairs, max difference %.3g", worst);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  const auto classical =
      run_classical(permuted_grouping(4, 2), AdversaryModel::worst_pair(), kMonteCarloRounds, kMonteCarloSeed);
  const auto quantum = run_quantum(8, 2, AdversaryModel::worst_pair(), kMonteCarloRounds, kMonteCarloSeed);
  if (classical.exact_target != Rational(1, 3) || quantum.exact_target != Rational(1, 7)) fail(o, "wrong targets");
  if (!classical.within_bound) fail(o, "classical run outside the band");
  if (!quantum.within_bound) fail(o, "quantum run outside the band");
  char buf[200];
  std::snprintf(buf, sizeof buf, "classical %.6f vs 1/3, quantum %.6f vs 1/7, radius %.5f",
                to_double(classical.empirical_error), to_double(quantum.empirical_error), classical.radius);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome quantum_beats_classical() {
  Outcome o;
  int cases = 0;
  for (std::size_t m : {2, 3}) {
    for (std::size_t n = m * m + 1; n <= 36; ++n) {
      const auto q = frame_protocol_error(n, m);
      const auto s = semiclassical_bound(n, m);
      if (!(q < classical_bound(n, m))) fail(o, "not below classical at n=" + std::to_string(n));
      if (!(q <= s)) fail(o, "above grouped bound at n=" + std::to_string(n));
      if (n % (m * m) != 0 && !(q < s)) fail(o, "not strictly below grouped bound at n=" + std::to_string(n));
      ++cases;
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " (n,m) cases";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"exhaustive minimum equals closed-form error mass", exhaustive_matches_bound},
      {"asymmetric alphabets follow the smaller alphabet", asymmetric_alphabets},
      {"permuted grouping error is exact and uniform", permuted_strategy_exact},
      {"basis protocol is error-free", quantum_error_free},
      {"frame protocol error matches closed form", frame_error_matches},
      {"frame potential bound and tightness", frame_bound},
      {"entangled overlap equals trace formula", trace_identity},
      {"Monte Carlo inside Hoeffding band", monte_carlo},
      {"quantum error below classical bounds", quantum_beats_classical},
  };
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(checks.size()) - failures, checks.size());
  return failures == 0 ? 0 : 1;
}

#pragma once

// Batch commands behind the smpfp executable.  Each command takes a validated
// RunConfig and returns the text for stdout plus an exit code:
//   0  all internal consistency checks passed
//   1  a report's invariant check failed
//   2  bad input, regime violation or budget refusal

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "smpfp/classical.hpp"
#include "smpfp/oracle.hpp"
#include "smpfp/quantum.hpp"
#include "smpfp/serialize.hpp"
#include "smpfp/sim.hpp"
#include "smpfp/strategy.hpp"

namespace smpfp::cli {

enum ExitCode : int { kOk = 0, kInvariantViolation = 1, kBadInput = 2 };

inline const std::vector<std::string>& protocol_ids() {
  static const std::vector<std::string> ids{"grouping", "permuted-grouping", "semiclassical-grouping",
                                            "quantum-basis", "quantum-frame"};
  return ids;
}

struct RunConfig {
  std::string subcommand;
  std::size_t n = 0;
  std::optional<std::size_t> m;
  std::optional<std::size_t> m_alice;
  std::optional<std::size_t> m_bob;
  std::string protocol;
  std::uint64_t rounds = 100000;
  std::uint64_t seed = 1;
  std::string output = "json";
  double budget = 1e9;
  bool sweep = false;
  std::string adversary = "worst-pair";
  /// "x:y,x:y,..." for the scripted adversary.
  std::string script;
  /// Strategy JSON for `evaluate`.
  std::string input;
  /// Per-round CSV trace for `simulate`, capped at trace_rows rows.
  std::string trace;
  std::uint64_t trace_rows = 10000;
  bool prune = false;
  bool state_vector = false;
  bool dump = false;

  std::size_t alice_alphabet() const { return m_alice ? *m_alice : m.value_or(0); }
  std::size_t bob_alphabet() const { return m_bob ? *m_bob : m.value_or(0); }
  std::size_t symmetric_m() const { return m.value_or(std::min(alice_alphabet(), bob_alphabet())); }
};

struct CommandResult {
  int exit_code = kOk;
  std::string out;
  std::string err;
};

namespace detail {

inline bool is_quantum(const std::string& protocol) {
  return protocol == "quantum-basis" || protocol == "quantum-frame";
}

inline std::vector<std::pair<std::size_t, std::size_t>> parse_script(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidArgument("script entries look like x:y, got '" + item + "'");
    try {
      pairs.emplace_back(std::stoul(item.substr(0, colon)), std::stoul(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad script entry '" + item + "'");
    }
  }
  return pairs;
}

inline AdversaryModel parse_adversary(const RunConfig& c) {
  if (c.adversary == "worst-pair") return AdversaryModel::worst_pair();
  if (c.adversary == "uniform-unequal") return AdversaryModel::uniform_unequal();
  if (c.adversary == "uniform-all") return AdversaryModel::uniform_all();
  if (c.adversary == "equal-only") return AdversaryModel::equal_only();
  if (c.adversary == "scripted") return AdversaryModel::scripted(parse_script(c.script));
  throw InvalidArgument("unknown adversary '" + c.adversary + "'");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// Rejects invalid flag combinations before dispatch.
inline void validate(const RunConfig& c) {
  static const std::vector<std::string> subcommands{"bound",       "construct",    "evaluate",
                                                    "brute-force", "frame-verify", "simulate"};
  if (std::find(subcommands.begin(), subcommands.end(), c.subcommand) == subcommands.end()) {
    throw InvalidArgument("unknown subcommand '" + c.subcommand + "'");
  }
  if (c.output != "json" && c.output != "csv") throw InvalidArgument("--output must be json or csv");
  if (!c.protocol.empty() &&
      std::find(protocol_ids().begin(), protocol_ids().end(), c.protocol) == protocol_ids().end()) {
    throw InvalidArgument("unknown protocol '" + c.protocol + "'");
  }
  const bool needs_params = !(c.subcommand == "evaluate" && !c.input.empty());
  if (needs_params) {
    if (c.n < 1) throw InvalidArgument("--n must be >= 1");
    if (c.alice_alphabet() < 1 || c.bob_alphabet() < 1) throw InvalidArgument("--m (or --m-alice/--m-bob) must be >= 1");
  }
  if (c.m_alice.has_value() != c.m_bob.has_value() && !c.m) {
    throw InvalidArgument("--m-alice and --m-bob must be given together");
  }
  if (c.subcommand != "brute-force" && c.m_alice && c.m_bob && *c.m_alice != *c.m_bob) {
    throw InvalidArgument("asymmetric alphabets are only supported by brute-force and --input strategies");
  }
  if (c.budget <= 0) throw InvalidArgument("--budget must be positive");
  if (c.subcommand == "simulate") {
    if (c.rounds < 1) throw InvalidArgument("--rounds must be >= 1");
    if (c.protocol.empty()) throw InvalidArgument("simulate needs --protocol");
  }
  if (c.subcommand == "construct" && c.protocol.empty()) throw InvalidArgument("construct needs --protocol");
  if (c.subcommand == "evaluate" && c.protocol.empty() && c.input.empty()) {
    throw InvalidArgument("evaluate needs --protocol or --input");
  }
  if (!c.protocol.empty() && needs_params) {
    const std::size_t m = c.symmetric_m();
    if (c.protocol == "quantum-basis" && c.n > m * m) {
      throw InvalidArgument("protocol regime: quantum-basis needs n <= m^2 (n=" + std::to_string(c.n) +
                            ", m^2=" + std::to_string(m * m) + ")");
    }
    if (c.protocol == "quantum-frame" && c.n < m * m) {
      throw InvalidArgument("protocol regime: quantum-frame needs n >= m^2 (n=" + std::to_string(c.n) +
                            ", m^2=" + std::to_string(m * m) + ")");
    }
  }
}

struct BoundRow {
  std::size_t n;
  std::size_t m;
  Rational classical;
  Rational semiclassical;
  Rational quantum;
};

inline BoundRow bound_row(std::size_t n, std::size_t m) {
  return {n, m, classical_bound(n, m), semiclassical_bound(n, m), frame_protocol_error(n, m)};
}

/// Classical, semiclassical and quantum worst-case errors side by side.  With
/// --sweep, --n and --m are upper limits: one row per m' in [1, m] and
/// n' in [m', n], m' outer.
inline CommandResult cmd_bound(const RunConfig& c) {
  const std::size_t m = c.symmetric_m();
  std::vector<BoundRow> rows;
  if (c.sweep) {
    for (std::size_t mm = 1; mm <= m; ++mm) {
      for (std::size_t nn = mm; nn <= c.n; ++nn) rows.push_back(bound_row(nn, mm));
    }
  } else {
    rows.push_back(bound_row(c.n, m));
  }
  CommandResult res;
  for (const auto& r : rows) {
    const bool consistent = r.classical == exact_permuted_error(r.n, r.m) && r.quantum <= r.semiclassical &&
                            r.semiclassical <= r.classical;
    if (!consistent) {
      res.exit_code = kInvariantViolation;
      res.err += "bound inconsistency at n=" + std::to_string(r.n) + " m=" + std::to_string(r.m) + "\n";
    }
  }
  if (c.output == "csv") {
    std::ostringstream os;
    os << "n,m,classical,semiclassical,quantum,classical_float,semiclassical_float,quantum_float\n";
    char buf[128];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g", to_double(r.classical), to_double(r.semiclassical),
                    to_double(r.quantum));
      os << r.n << ',' << r.m << ',' << to_string(r.classical) << ',' << to_string(r.semiclassical) << ','
         << to_string(r.quantum) << ',' << buf << '\n';
    }
    res.out = os.str();
    return res;
  }
  json out = json::array();
  for (const auto& r : rows) {
    json j;
    j["n"] = r.n;
    j["m"] = r.m;
    put_rational(j, "classical", r.classical);
    put_rational(j, "semiclassical", r.semiclassical);
    put_rational(j, "quantum", r.quantum);
    out.push_back(std::move(j));
  }
  res.out = detail::dump(c.sweep ? out : out.front());
  return res;
}

/// Classical triple behind a protocol id.  The semiclassical protocol is the
/// permuted grouping over m^2 labels followed by an error-free basis
/// comparison, so its classical equivalent groups into m^2 fingerprints.
inline StrategyTriple classical_protocol(const std::string& protocol, std::size_t n, std::size_t m) {
  if (protocol == "grouping") return grouping_strategy(n, m);
  if (protocol == "permuted-grouping") return permuted_grouping(n, m);
  if (protocol == "semiclassical-grouping") return permuted_grouping(n, m * m);
  throw InvalidArgument("'" + protocol + "' is not a classical protocol");
}

inline CommandResult cmd_construct(const RunConfig& c) {
  CommandResult res;
  const std::size_t m = c.symmetric_m();
  if (detail::is_quantum(c.protocol)) {
    const auto frame = protocol_frame(c.n, m);
    res.out = c.output == "csv" ? frame_to_csv(frame) : detail::dump(frame_to_json(frame));
    return res;
  }
  if (c.output == "csv") throw InvalidArgument("strategy triples are emitted as JSON only");
  res.out = detail::dump(triple_to_json(classical_protocol(c.protocol, c.n, m)));
  return res;
}

/// Exact evaluation.  Classical protocols and --input strategies get a full
/// error profile; quantum protocols get their pairwise acceptance statistics.
inline CommandResult cmd_evaluate(const RunConfig& c) {
  CommandResult res;
  json j;
  bool ok = true;
  if (detail::is_quantum(c.protocol) && c.input.empty()) {
    const std::size_t m = c.symmetric_m();
    j["protocol"] = c.protocol;
    j["n"] = c.n;
    j["m"] = m;
    if (c.protocol == "quantum-basis") {
      const auto v = basis_protocol_verdict(c.n, m);
      j["max_equal_deviation"] = v.max_equal_deviation;
      j["max_unequal_acceptance"] = v.max_unequal_acceptance;
      j["error_free"] = v.error_free;
      put_rational(j, "wce", Rational(0));
      ok = v.error_free;
    } else {
      const auto s = frame_acceptance_stats(c.n, m);
      j["mean_unequal_acceptance"] = s.mean_unequal_acceptance;
      j["max_unequal_acceptance"] = s.max_unequal_acceptance;
      j["max_equal_deviation"] = s.max_equal_deviation;
      put_rational(j, "expected_mean", s.expected_mean);
      put_rational(j, "wce", frame_protocol_error(c.n, m));
      j["one_sided"] = s.one_sided;
      j["mean_matches"] = s.mean_matches;
      ok = s.one_sided && s.mean_matches;
    }
  } else {
    std::optional<StrategyTriple> triple;
    if (!c.input.empty()) {
      std::ifstream in(c.input);
      if (!in) throw InvalidArgument("cannot open " + c.input);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("cannot parse ") + c.input + ": " + e.what());
      }
      triple.emplace(triple_from_json(doc));
    } else {
      triple.emplace(classical_protocol(c.protocol, c.n, c.symmetric_m()));
    }
    const auto profile = error_profile(*triple);
    const bool one_sided = is_one_sided(*triple);
    j["n"] = triple->params().n;
    j["m_alice"] = triple->params().m_alice;
    j["m_bob"] = triple->params().m_bob;
    j["keys"] = triple->keys().size();
    j["deterministic"] = triple->is_deterministic();
    j["one_sided"] = one_sided;
    j["profile"] = profile_to_json(profile);
    if (!c.protocol.empty() && c.input.empty()) {
      const std::size_t n = triple->params().n;
      const std::size_t groups = triple->params().m_alice;
      json checks;
      if (c.protocol == "grouping") {
        const bool mass = profile.ne == Rational(min_error_mass(n, groups));
        checks["ne_equals_min_error_mass"] = mass;
        ok = mass && one_sided;
      } else {
        const bool wce = profile.wce == classical_bound(n, groups);
        checks["wce_equals_bound"] = wce;
        ok = wce && one_sided;
      }
      j["checks"] = std::move(checks);
    }
  }
  res.out = detail::dump(j);
  if (!ok) {
    res.exit_code = kInvariantViolation;
    res.err = "evaluation consistency check failed\n";
  }
  return res;
}

inline CommandResult cmd_bruteforce(const RunConfig& c) {
  OracleOptions opts;
  opts.budget = c.budget;
  opts.prune_alice_relabelings = c.prune;
  const auto report = exhaustive_min_ne(c.n, c.alice_alphabet(), c.bob_alphabet(), opts);
  CommandResult res;
  res.out = detail::dump(oracle_report_to_json(report));
  if (!report.matches_bound) {
    res.exit_code = kInvariantViolation;
    res.err = "exhaustive minimum differs from the closed-form bound\n";
  }
  return res;
}

inline constexpr double kFramePotentialRelTolerance = 1e-6;

/// Structural checks of the unitary family: unitarity, normalization, frame
/// potential against n^2, orthonormality at n = m^2.  --dump emits the
/// matrices instead (JSON or CSV) after the checks pass.
inline CommandResult cmd_frame_verify(const RunConfig& c) {
  const std::size_t m = c.symmetric_m();
  if (c.n < m * m) {
    throw InvalidArgument("protocol regime: frame-verify needs n >= m^2 (n=" + std::to_string(c.n) +
                          ", m^2=" + std::to_string(m * m) + ")");
  }
  const auto frame = utof_frame(c.n, m);
  const double potential = frame.frame_potential();
  const double n2 = static_cast<double>(c.n) * static_cast<double>(c.n);
  const bool tight = std::abs(potential - n2) <= kFramePotentialRelTolerance * n2;
  const bool unitary = frame.max_unitarity_defect() <= kStructuralTolerance;
  const bool normalized = frame.max_normalization_defect() <= kAggregateTolerance;
  std::optional<bool> orthonormal;
  if (c.n == m * m) {
    bool ortho = true;
    for (std::size_t x = 0; x < c.n; ++x) {
      for (std::size_t y = 0; y < c.n; ++y) {
        const double mag = std::abs(trace_overlap(frame.members[x], frame.members[y])) * static_cast<double>(m);
        ortho = ortho && std::abs(mag - (x == y ? static_cast<double>(m) : 0.0)) <= kAggregateTolerance;
      }
    }
    orthonormal = ortho;
  }
  const bool ok = tight && unitary && normalized && orthonormal.value_or(true);

  CommandResult res;
  if (!ok) {
    res.exit_code = kInvariantViolation;
    res.err = "frame check failed\n";
  }
  if (c.dump) {
    res.out = c.output == "csv" ? frame_to_csv(frame) : detail::dump(frame_to_json(frame));
    return res;
  }
  json j;
  j["n"] = c.n;
  j["m"] = m;
  j["potential"] = potential;
  j["potential_target"] = n2;
  j["tight"] = tight;
  j["max_unitarity_defect"] = frame.max_unitarity_defect();
  j["max_normalization_defect"] = frame.max_normalization_defect();
  j["unitary"] = unitary;
  if (orthonormal) {
    j["orthonormal"] = *orthonormal;
  } else {
    j["orthonormal"] = nullptr;
  }
  res.out = detail::dump(j);
  return res;
}

inline CommandResult cmd_simulate(const RunConfig& c) {
  const auto adversary = detail::parse_adversary(c);
  const std::size_t m = c.symmetric_m();
  SimOptions opts;
  opts.quantum_evaluation = c.state_vector ? RoundEvaluation::kStateVector : RoundEvaluation::kTraceFormula;
  std::ofstream trace;
  std::uint64_t written = 0;
  if (!c.trace.empty()) {
    trace.open(c.trace);
    if (!trace) throw InvalidArgument("cannot open trace file " + c.trace);
    trace << round_csv_header();
    opts.observer = [&](const RoundOutcome& o) {
      if (written < c.trace_rows) {
        trace << round_to_csv(o);
        ++written;
      }
    };
  }
  SimulationReport report;
  if (detail::is_quantum(c.protocol)) {
    report = run_quantum(c.n, m, adversary, c.rounds, c.seed, opts);
  } else {
    report = run_classical(classical_protocol(c.protocol, c.n, m), adversary, c.rounds, c.seed, opts);
  }
  report.protocol = c.protocol;
  CommandResult res;
  json j = sim_report_to_json(report);
  j["n"] = c.n;
  j["m"] = m;
  j["trace_rows"] = written;
  res.out = detail::dump(j);
  if (!report.within_bound || report.false_negatives > 0) {
    res.exit_code = kInvariantViolation;
    res.err = "simulation outside the Hoeffding band or one-sided property violated\n";
  }
  return res;
}

/// Validates and dispatches; library exceptions become exit code 2.
inline CommandResult run(const RunConfig& c) {
  try {
    validate(c);
    if (c.subcommand == "bound") return cmd_bound(c);
    if (c.subcommand == "construct") return cmd_construct(c);
    if (c.subcommand == "evaluate") return cmd_evaluate(c);
    if (c.subcommand == "brute-force") return cmd_bruteforce(c);
    if (c.subcommand == "frame-verify") return cmd_frame_verify(c);
    return cmd_simulate(c);
  } catch (const BudgetExceeded& e) {
    return {kBadInput, "", std::string("budget refusal: ") + e.what() + "\n"};
  } catch (const InvalidArgument& e) {
    return {kBadInput, "", std::string("invalid input: ") + e.what() + "\n"};
  }
}

}  // namespace smpfp::cli

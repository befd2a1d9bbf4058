#pragma once

// JSON and CSV encodings.
//
// Strategy triple (format "smpfp.strategy.v1"):
//
//   {
//     "format": "smpfp.strategy.v1",
//     "n": 4, "m_alice": 2, "m_bob": 2,
//     "keys":    {"uniform": 24}  |  {"weights": ["1/2", "1/2"]},
//     "alice":   {"assignments": [[0, 1, 0, 1], ...]}      one row per key
//              | {"tables": [[["1/1", "0/1"], ...], ...]}  key -> n x m_alice
//     "bob":     same forms, n x m_bob,
//     "referee": [["1/1", "0/1"], ["0/1", "1/1"]]          m_alice x m_bob
//   }
//
// Exact rationals are "num/den" strings (bare integers are accepted on
// input).  Reports carry each rational as a string plus a "<name>_float"
// convenience field; the string is authoritative.  All indices are 0-based.

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smpfp/classical.hpp"
#include "smpfp/oracle.hpp"
#include "smpfp/quantum.hpp"
#include "smpfp/rational.hpp"
#include "smpfp/sim.hpp"
#include "smpfp/strategy.hpp"

namespace smpfp {

using json = nlohmann::ordered_json;

inline constexpr const char* kStrategyFormat = "smpfp.strategy.v1";

inline void put_rational(json& j, const std::string& name, const Rational& r) {
  j[name] = to_string(r);
  j[name + "_float"] = to_double(r);
}

inline json rational_matrix_json(const RationalMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_string(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw InvalidArgument("expected a rational string, got " + j.dump());
}

inline RationalMatrix rational_matrix_from_json(const json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) throw InvalidArgument("matrix has wrong number of rows");
  RationalMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw InvalidArgument("matrix row has wrong length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rational_from_json(j[r][c]);
  }
  return m;
}

inline json party_json(const PartyStrategy& p) {
  if (p.is_lazy()) throw InvalidArgument("lazily generated key spaces are not serializable");
  json out;
  if (p.has_tables()) {
    json tables = json::array();
    for (std::uint64_t k = 0; k < p.key_count(); ++k) tables.push_back(rational_matrix_json(p.table(k)));
    out["tables"] = std::move(tables);
  } else {
    json rows = json::array();
    for (std::uint64_t k = 0; k < p.key_count(); ++k) {
      json row = json::array();
      for (std::size_t x = 0; x < p.messages(); ++x) row.push_back(p.fingerprint(k, x));
      rows.push_back(std::move(row));
    }
    out["assignments"] = std::move(rows);
  }
  return out;
}

inline PartyStrategy party_from_json(const json& j, std::size_t n, std::size_t m) {
  if (j.contains("assignments")) {
    std::vector<std::vector<std::size_t>> rows;
    for (const auto& row : j.at("assignments")) {
      rows.push_back(row.get<std::vector<std::size_t>>());
      if (rows.back().size() != n) throw InvalidArgument("assignment row length differs from n");
    }
    return PartyStrategy::from_assignments(m, std::move(rows));
  }
  if (j.contains("tables")) {
    std::vector<RationalMatrix> tables;
    for (const auto& t : j.at("tables")) tables.push_back(rational_matrix_from_json(t, n, m));
    return PartyStrategy::from_tables(std::move(tables));
  }
  throw InvalidArgument("party strategy needs \"assignments\" or \"tables\"");
}

inline json triple_to_json(const StrategyTriple& t) {
  json j;
  j["format"] = kStrategyFormat;
  j["n"] = t.params().n;
  j["m_alice"] = t.params().m_alice;
  j["m_bob"] = t.params().m_bob;
  if (t.keys().is_uniform()) {
    j["keys"] = {{"uniform", t.keys().size()}};
  } else {
    json w = json::array();
    for (std::uint64_t k = 0; k < t.keys().size(); ++k) w.push_back(to_string(t.keys().weight(k)));
    j["keys"] = {{"weights", std::move(w)}};
  }
  j["alice"] = party_json(t.alice());
  j["bob"] = party_json(t.bob());
  j["referee"] = rational_matrix_json(t.referee().matrix());
  return j;
}

inline StrategyTriple triple_from_json(const json& j) {
  try {
    if (j.value("format", std::string(kStrategyFormat)) != kStrategyFormat) {
      throw InvalidArgument("unsupported strategy format " + j.at("format").dump());
    }
    ProtocolParams params{j.at("n").get<std::size_t>(), j.at("m_alice").get<std::size_t>(),
                          j.at("m_bob").get<std::size_t>()};
    params.validate();
    const auto& keys = j.at("keys");
    SharedKeyDistribution dist = SharedKeyDistribution::single();
    if (keys.contains("uniform")) {
      dist = SharedKeyDistribution::uniform(keys.at("uniform").get<std::uint64_t>());
    } else if (keys.contains("weights")) {
      std::vector<Rational> w;
      for (const auto& v : keys.at("weights")) w.push_back(rational_from_json(v));
      dist = SharedKeyDistribution::from_weights(std::move(w));
    } else {
      throw InvalidArgument("keys needs \"uniform\" or \"weights\"");
    }
    auto alice = party_from_json(j.at("alice"), params.n, params.m_alice);
    auto bob = party_from_json(j.at("bob"), params.n, params.m_bob);
    RefereeRule referee(rational_matrix_from_json(j.at("referee"), params.m_alice, params.m_bob));
    return StrategyTriple(params, std::move(alice), std::move(bob), std::move(referee), std::move(dist));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed strategy JSON: ") + e.what());
  }
}

inline json profile_to_json(const ErrorProfile& p) {
  json j;
  j["p1"] = rational_matrix_json(p.p1);
  j["pe"] = rational_matrix_json(p.pe);
  put_rational(j, "wce", p.wce);
  put_rational(j, "ne", p.ne);
  return j;
}

inline json assignment_json(const GroupAssignment& g) { return g.groups; }

inline json oracle_report_to_json(const OracleReport& r) {
  json j;
  j["n"] = r.n;
  j["m_alice"] = r.m_alice;
  j["m_bob"] = r.m_bob;
  j["min_ne"] = r.min_ne;
  j["bound_value"] = r.bound_value;
  j["matches_bound"] = r.matches_bound;
  j["strategies_scanned"] = r.strategies_scanned;
  j["pruned"] = r.pruned;
  j["witness_count"] = r.witness_count;
  json w = json::array();
  for (const auto& p : r.witnesses) w.push_back({{"alice", assignment_json(p.alice)}, {"bob", assignment_json(p.bob)}});
  j["witnesses"] = std::move(w);
  return j;
}

inline json sim_report_to_json(const SimulationReport& r) {
  json j;
  j["protocol"] = r.protocol;
  j["adversary"] = r.adversary;
  j["rounds"] = r.rounds;
  j["seed"] = r.seed;
  j["errors"] = r.errors;
  j["equal_rounds"] = r.equal_rounds;
  j["false_negatives"] = r.false_negatives;
  put_rational(j, "empirical_error", r.empirical_error);
  put_rational(j, "exact_target", r.exact_target);
  j["deviation"] = r.deviation;
  j["hoeffding_radius"] = r.radius;
  j["delta"] = kHoeffdingDelta;
  j["within_bound"] = r.within_bound;
  return j;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Frame dump: members in x order, each m x m row-major, entries as
/// [re, im] pairs.
inline json frame_to_json(const UnitaryFrame& f) {
  json j;
  j["n"] = f.n;
  j["dim"] = f.dim;
  j["ordering"] = "members[x][j][k] = [re, im] of <j|U_x|k>, 0-based";
  json members = json::array();
  for (const auto& u : f.members) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < u.cols(); ++c) row.push_back({u(r, c).real(), u(r, c).imag()});
      rows.push_back(std::move(row));
    }
    members.push_back(std::move(rows));
  }
  j["members"] = std::move(members);
  return j;
}

/// CSV with header x,j,k,re,im; rows in (x, j, k) lexicographic order.
inline std::string frame_to_csv(const UnitaryFrame& f) {
  std::ostringstream os;
  os << "x,j,k,re,im\n";
  for (std::size_t x = 0; x < f.n; ++x) {
    const auto& u = f.members[x];
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
      for (Eigen::Index k = 0; k < u.cols(); ++k) {
        os << x << ',' << j << ',' << k << ',' << format_double(u(j, k).real()) << ','
           << format_double(u(j, k).imag()) << '\n';
      }
    }
  }
  return os.str();
}

inline std::string round_csv_header() { return "round,key,x,y,a,b,accept_probability,z,correct\n"; }

inline std::string round_to_csv(const RoundOutcome& o) {
  std::ostringstream os;
  os << o.round << ',';
  if (o.key) os << *o.key;
  os << ',' << o.x << ',' << o.y << ',';
  if (o.a) os << *o.a;
  os << ',';
  if (o.b) os << *o.b;
  os << ',';
  if (o.accept_probability) os << format_double(*o.accept_probability);
  os << ',' << o.z << ',' << (o.correct ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace smpfp

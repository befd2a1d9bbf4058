// Command-line front end: parses flags, runs one batch command, prints the
// report to stdout and diagnostics to stderr.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "smpfp/cli.hpp"

namespace {

void add_common(CLI::App* sub, smpfp::cli::RunConfig& c) {
  sub->add_option("--n", c.n, "number of inputs");
  sub->add_option("--m", c.m, "message alphabet size (both parties)");
  sub->add_option("--m-alice", c.m_alice, "Alice's alphabet size");
  sub->add_option("--m-bob", c.m_bob, "Bob's alphabet size");
  sub->add_option("--output", c.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  smpfp::cli::RunConfig c;
  CLI::App app{"Exact analysis of simultaneous-message equality protocols"};
  app.require_subcommand(1);

  auto* bound = app.add_subcommand("bound", "closed-form worst-case errors");
  add_common(bound, c);
  bound->add_flag("--sweep", c.sweep, "all m' <= m, m' <= n' <= n");

  auto* construct = app.add_subcommand("construct", "emit a protocol's strategy or unitary family");
  add_common(construct, c);
  construct->add_option("--protocol", c.protocol)->required();

  auto* evaluate = app.add_subcommand("evaluate", "exact error profile");
  add_common(evaluate, c);
  evaluate->add_option("--protocol", c.protocol);
  evaluate->add_option("--input", c.input, "strategy JSON file");

  auto* brute = app.add_subcommand("brute-force", "exhaustive minimum over deterministic strategies");
  add_common(brute, c);
  brute->add_option("--budget", c.budget, "maximum strategy pairs to scan");
  brute->add_flag("--prune", c.prune, "skip Alice relabelings");

  auto* frame = app.add_subcommand("frame-verify", "structural checks of the unitary family");
  add_common(frame, c);
  frame->add_flag("--dump", c.dump, "emit the matrices");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rounds against the exact error");
  add_common(simulate, c);
  simulate->add_option("--protocol", c.protocol)->required();
  simulate->add_option("--rounds", c.rounds);
  simulate->add_option("--seed", c.seed);
  simulate->add_option("--adversary", c.adversary)
      ->check(CLI::IsMember({"worst-pair", "uniform-unequal", "uniform-all", "equal-only", "scripted"}));
  simulate->add_option("--script", c.script, "x:y,x:y,... for --adversary scripted");
  simulate->add_option("--trace", c.trace, "per-round CSV output");
  simulate->add_option("--trace-rows", c.trace_rows);
  simulate->add_flag("--state-vector", c.state_vector, "evaluate quantum rounds on the explicit state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : smpfp::cli::kBadInput;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  const auto result = smpfp::cli::run(c);
  std::cout << result.out;
  std::cerr << result.err;
  return result.exit_code;
}

// splitsim: run splitting constructions on scenarios, verify traces, fuzz,
// and print per-block or per-requirement chronologies.
//
// Exit codes: 0 success, 1 check failure, 2 bad input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "splitsim/corrupt.hpp"
#include "splitsim/explain.hpp"
#include "splitsim/fuzz.hpp"
#include "splitsim/scenario.hpp"
#include "splitsim/verifier.hpp"

namespace {

using namespace splitsim;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

void print_report(const VerificationReport& report) {
  for (const auto& c : report.checks) {
    std::printf("%-4s %-28s %-7s", c.id.c_str(), c.name.c_str(), std::string(status_name(c.status)).c_str());
    if (!c.message.empty()) std::printf(" %s", c.message.c_str());
    if (c.witness_stage) std::printf(" (stage %d)", *c.witness_stage);
    std::printf("\n");
  }
  std::string flags;
  for (const auto& f : report.flags) flags += (flags.empty() ? "" : ",") + f;
  std::printf("flags: %s\n", flags.c_str());
}

int finish_verification(const VerificationReport& report, const std::string& report_path) {
  print_report(report);
  if (!report_path.empty()) write_file(report_path, report.to_json().dump(2) + "\n");
  return report.passed() ? kOk : kFailed;
}

int cmd_run(const std::string& scenario_path, const std::string& trace_path, const std::string& report_path,
            const std::string& corrupt) {
  const Scenario sc = load_scenario_text(read_file(scenario_path));
  RunResult result = run(sc);
  if (!corrupt.empty()) result.trace = corrupt_trace(sc, std::move(result.trace), corrupt);
  if (!trace_path.empty()) write_file(trace_path, format_trace(result.trace));
  const VerificationReport report = verify(sc, result.trace, &result.final);
  if (result.final.failure) std::fprintf(stderr, "run aborted: %s\n", result.final.failure->what.c_str());
  return finish_verification(report, report_path);
}

int cmd_verify(const std::string& scenario_path, const std::string& trace_path, const std::string& report_path) {
  const Scenario sc = load_scenario_text(read_file(scenario_path));
  const Trace trace = parse_trace(read_file(trace_path));
  return finish_verification(verify(sc, trace), report_path);
}

int cmd_fuzz(std::uint64_t seed, std::uint64_t count, const std::string& construction, int max_horizon,
             const std::string& failure_out) {
  FuzzParams params;
  if (construction == "sacks") {
    params.construction = ConstructionKind::Sacks;
  } else if (construction == "robinson") {
    params.construction = ConstructionKind::Robinson;
  } else {
    throw InputError("--construction must be sacks or robinson");
  }
  if (max_horizon < 4 || max_horizon > 1024) throw InputError("--max-horizon must be in [4, 1024]");
  params.max_horizon = max_horizon;

  std::printf("%8s %8s %-6s %-9s %14s %14s %8s %s\n", "index", "horizon", "result", "settled", "max-restraint",
              "max-inits", "injuries", "failed-checks");
  FuzzSummary summary;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Scenario sc = generate_scenario(seed, i, params);
    const RunResult result = run(sc);
    const VerificationReport report = verify(sc, result.trace, &result.final);
    const FuzzRow row = summarize(i, sc, result, report);
    std::string failed;
    for (const auto& id : row.failed_checks) failed += (failed.empty() ? "" : ",") + id;
    std::printf("%8llu %8d %-6s %-9s %14d %14d %8d %s\n", static_cast<unsigned long long>(i), row.horizon,
                row.passed ? "pass" : "FAIL", row.settled ? "settled" : "unsettled", row.max_restraint,
                row.max_initializations, row.injuries, failed.c_str());
    if (row.passed) {
      ++summary.passed;
    } else {
      ++summary.failed;
      if (!summary.first_failure) {
        summary.first_failure = i;
        write_file(failure_out, scenario_to_json(sc).dump(2) + "\n");
        write_file(failure_out + ".trace", format_trace(result.trace));
      }
    }
    if (!row.settled) ++summary.unsettled;
    summary.rows.push_back(row);
  }
  int max_restraint = -1, max_inits = 0, max_injuries = 0;
  for (const auto& r : summary.rows) {
    max_restraint = std::max(max_restraint, r.max_restraint);
    max_inits = std::max(max_inits, r.max_initializations);
    max_injuries = std::max(max_injuries, r.injuries);
  }
  std::printf("total %zu  pass %d  fail %d  unsettled %d  max-restraint %d  max-inits-per-block %d  max-injuries %d\n",
              summary.rows.size(), summary.passed, summary.failed, summary.unsettled, max_restraint, max_inits,
              max_injuries);
  if (summary.first_failure) {
    std::fprintf(stderr, "first failing scenario (index %llu) written to %s\n",
                 static_cast<unsigned long long>(*summary.first_failure), failure_out.c_str());
    return kFailed;
  }
  return kOk;
}

int cmd_explain(const std::string& trace_path, const std::string& block, const std::string& requirement,
                const std::optional<int>& input) {
  ExplainFilter filter;
  if (!block.empty()) {
    auto f = parse_block_filter(block, filter);
    if (!f) throw InputError("malformed block id '" + block + "'");
    filter = *f;
  }
  if (!requirement.empty()) {
    filter.requirement = parse_requirement_label(requirement);
    if (!filter.requirement) throw InputError("malformed requirement id '" + requirement + "' (expected P:e or Q:e)");
  }
  if (input && *input < 0) throw InputError("--input must be nonnegative");
  filter.input = input;
  const Trace trace = parse_trace(read_file(trace_path));
  for (const auto& line : explain(trace, filter)) std::printf("%s\n", line.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon simulator and trace checker for c.e. splitting constructions"};
  app.require_subcommand(1);

  std::string scenario, trace, report, corrupt, construction = "sacks", failure_out = "fuzz-failure.json";
  std::string block, requirement;
  std::optional<int> input;
  std::uint64_t seed = 0, count = 0;
  int max_horizon = 256;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and verify its trace");
  run_cmd->add_option("--scenario", scenario, "Scenario JSON")->required();
  run_cmd->add_option("--trace", trace, "Write the trace here");
  run_cmd->add_option("--report", report, "Write the JSON report here");
#ifdef SPLITSIM_CORRUPT_HOOK
  run_cmd->add_option("--corrupt", corrupt, "Test hook: corrupt the trace for check V1..V11 before verifying");
#endif

  auto* verify_cmd = app.add_subcommand("verify", "Verify an existing trace against its scenario");
  verify_cmd->add_option("--scenario", scenario, "Scenario JSON")->required();
  verify_cmd->add_option("--trace", trace, "Trace file")->required();
  verify_cmd->add_option("--report", report, "Write the JSON report here");

  auto* fuzz_cmd = app.add_subcommand("fuzz", "Run and verify generated scenarios");
  fuzz_cmd->add_option("--seed", seed, "Generator seed")->required();
  fuzz_cmd->add_option("--count", count, "Number of scenarios")->required();
  fuzz_cmd->add_option("--construction", construction, "sacks or robinson")->required();
  fuzz_cmd->add_option("--max-horizon", max_horizon, "Largest horizon to generate (4..1024)");
  fuzz_cmd->add_option("--failure-out", failure_out, "Where to write the first failing scenario");

  auto* explain_cmd = app.add_subcommand("explain", "Print a chronology from a trace");
  explain_cmd->add_option("--trace", trace, "Trace file")->required();
  explain_cmd->add_option("--block", block, "Block: L:i, U:i, or i for both");
  explain_cmd->add_option("--requirement", requirement, "Requirement: P:e or Q:e");
  explain_cmd->add_option("--input", input, "Input x");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*run_cmd) return cmd_run(scenario, trace, report, corrupt);
    if (*verify_cmd) return cmd_verify(scenario, trace, report);
    if (*fuzz_cmd) return cmd_fuzz(seed, count, construction, max_horizon, failure_out);
    if (*explain_cmd) return cmd_explain(trace, block, requirement, input);
  } catch (const ValidationError& err) {
    std::fprintf(stderr, "%s\n", err.what());
    return kBadInput;
  } catch (const TraceParseError& err) {
    std::fprintf(stderr, "unreadable trace: %s\n", err.what());
    return kBadInput;
  } catch (const CorruptionInapplicable& err) {
    std::fprintf(stderr, "corruption not applicable: %s\n", err.what());
    return kBadInput;
  } catch (const InputError& err) {
    std::fprintf(stderr, "%s\n", err.what());
    return kBadInput;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "%s\n", err.what());
    return kBadInput;
  }
  return kBadInput;
}

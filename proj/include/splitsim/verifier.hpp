#pragma once

// Trace checker. Every check replays the trace against the scenario inputs
// with its own recomputation (routing, cone windows, assignment updates,
// p-approximations); no strategy-internal state is consulted.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "splitsim/scenario.hpp"

namespace splitsim {

enum class CheckStatus { Pass, Fail, Skipped };
std::string_view status_name(CheckStatus s);

struct CheckResult {
  std::string id;    // "V1" .. "V11"
  std::string name;  // "partition", ...
  CheckStatus status = CheckStatus::Pass;
  std::string message;
  std::optional<Stage> witness_stage;
  std::vector<std::size_t> witness_events;  // indices into the trace
};

/// Check ids in report order.
const std::vector<std::string>& check_ids();

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::set<std::string> flags;  // settled | unsettled | p-contract-violated | aborted
  Json diagnostics = Json::object();

  /// All checks that ran passed and the run was not aborted.
  bool passed() const;
  bool settled() const { return flags.count("unsettled") == 0; }
  const CheckResult& check(std::string_view id) const;
  Json to_json() const;
};

/// `final` is optional; when given, the replayed lambda_H/mu_H must match it
/// and an aborted run is reported.
VerificationReport verify(const Scenario& sc, const Trace& trace, const FinalState* final = nullptr);

}  // namespace splitsim

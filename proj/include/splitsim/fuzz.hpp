#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "splitsim/scenario.hpp"
#include "splitsim/verifier.hpp"

namespace splitsim {

struct FuzzParams {
  ConstructionKind construction = ConstructionKind::Sacks;
  int max_horizon = 256;     // at most 1024
  int max_functionals = 8;
  int max_axioms = 64;
};

/// Deterministic in (seed, index, params); always passes load_scenario.
Scenario generate_scenario(std::uint64_t seed, std::uint64_t index, const FuzzParams& params);
std::vector<Scenario> fuzz(std::uint64_t seed, std::uint64_t count, const FuzzParams& params);

struct FuzzRow {
  std::uint64_t index = 0;
  int horizon = 0;
  bool passed = false;
  bool settled = true;
  int max_restraint = -1;
  int max_initializations = 0;
  int injuries = 0;
  std::vector<std::string> failed_checks;
};

struct FuzzSummary {
  std::vector<FuzzRow> rows;
  int passed = 0;
  int failed = 0;
  int unsettled = 0;
  std::optional<std::uint64_t> first_failure;  // index into rows
};

FuzzRow summarize(std::uint64_t index, const Scenario& sc, const RunResult& result, const VerificationReport& report);

/// Runs and verifies each generated scenario in index order.
FuzzSummary run_fuzz(std::uint64_t seed, std::uint64_t count, const FuzzParams& params);

}  // namespace splitsim

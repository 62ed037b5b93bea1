#pragma once

// Scenario documents and runs: the given sets B, C, D, the functionals to
// diagonalize against, the p-policy, and orchestration of stages 0..H.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitsim/engine.hpp"
#include "splitsim/robinson.hpp"

namespace splitsim {

using Json = nlohmann::ordered_json;

struct ValidationIssue {
  std::string path;  // "$.b[2][1]"
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

enum class ConstructionKind { Sacks, Robinson };
std::string_view construction_name(ConstructionKind k);

struct ArrivalSpec {
  Stage stage;
  int element;
  friend auto operator<=>(const ArrivalSpec&, const ArrivalSpec&) = default;
};

/// Expands to an explicit C schedule from the scenario seed.
struct ChurnPolicy {
  int count = 4;  // number of C-enumerations
  int below = 4;  // elements are drawn from [0, below)
};

/// D enumerates, at each odd stage, the least x with a published local value
/// Delta(x) = 0 (or Gamma(x) = 0) that is not yet in D. At most `limit`
/// elements; -1 for no limit.
struct AntiDeltaPolicy {
  int limit = -1;
};

struct Scenario {
  int horizon = 2;
  ConstructionKind construction = ConstructionKind::Sacks;
  std::vector<ArrivalSpec> b;
  std::vector<ArrivalSpec> c;  // explicit, after any churn expansion
  std::optional<ChurnPolicy> c_policy;
  std::vector<ArrivalSpec> d;  // static part of D
  std::optional<AntiDeltaPolicy> d_policy;
  std::vector<FunctionalTable> functionals;
  PPolicy p_policy;
  int q_default = 2;
  std::map<int, int> q_overrides;
  std::uint64_t seed = 0;
};

Scenario load_scenario(const Json& doc);
Scenario load_scenario_text(const std::string& text);
/// Round-trips through load_scenario; a churn policy is written as its
/// expansion so the document is self-contained.
Json scenario_to_json(const Scenario& sc);

std::vector<ArrivalSpec> expand_churn(const ChurnPolicy& policy, int horizon, std::uint64_t seed);

struct InvariantFailure {
  Stage stage;
  std::string what;
};

struct FinalState {
  int horizon = 0;
  std::vector<int> lambda;  // lambda_H(P_e) for e = 0..H+1
  std::vector<int> mu;
  std::vector<Natural> a0, a1, b, c, d;
  std::map<BlockId, BlockState> blocks;
  std::optional<InvariantFailure> failure;
};

struct RunResult {
  Trace trace;
  FinalState final;
};

RunResult run(const Scenario& sc);

}  // namespace splitsim

#pragma once

// Certification-based strategies for P_e: D = Phi_e^{A0 + C} -> D = Delta_e^C
// and Q_e: D = Psi_e^{A1 + C} -> D = Gamma_e^C. A computation is trusted only
// after its C-segment has been checked against a guessing set W_j whose
// membership question is approximated by p(j, t) with at most q(j) changes.

#include <map>
#include <optional>
#include <vector>

#include "splitsim/engine.hpp"

namespace splitsim {

/// How p(j, t) is produced.
///   truthful_delay: p(j,t) = 1 iff t >= max(d, 1) and some sigma enumerated
///   into W_j by stage t-d has C_{t-d} in [sigma].
///   table: p(j, .) toggles at each listed stage (all >= 1); unlisted j stay 0.
struct PPolicy {
  enum Kind { kTruthfulDelay, kTable };
  Kind kind = kTruthfulDelay;
  int delay = 0;
  std::map<int, std::vector<Stage>> toggles;
};

struct GuessOwner {
  RequirementId req;
  int x = 0;
  int epoch = 0;
};

struct GuessEntry {
  BitString sigma;
  Stage stage = 0;
  ConeWindow window{0, 0};
};

struct CertificationRecord {
  enum Resolution { kPending, kCertified, kRefused };
  Axiom axiom;
  int j = -1;
  Stage start = 0;
  bool enumerated_sigma = false;  // sigma was added to W_j
  Resolution resolution = kPending;
  Stage resolved_at = -1;
  bool cached = false;  // answered from an earlier refusal of the same sigma
};

class GuessingRegistry {
 public:
  GuessingRegistry(PPolicy policy, int q_default, std::map<int, int> q_overrides, const EnumerationSchedule* c,
                   Stage last);

  int allocate(const GuessOwner& owner);
  int issued() const { return static_cast<int>(owners_.size()); }
  const GuessOwner& owner(int j) const { return owners_.at(j); }
  const std::vector<GuessEntry>& entries(int j) const { return sets_.at(j); }
  int q(int j) const;

  /// C_s in [W_j], counting only sigma enumerated by stage s.
  bool covers(int j, Stage s) const;
  void enumerate(int j, const BitString& sigma, Stage s);

  int p(int j, Stage t) const;
  int truth_x(int j, Stage at) const;
  /// |{t < last : p(j, t+1) != p(j, t)}|
  int mind_changes(int j) const;

  /// Adds sigma to W_j unless C_s is already covered, then scans t = s..last:
  /// leaving the cone refuses, p(j, t) = 1 certifies.
  CertificationRecord certify(int j, const Axiom& axiom, Stage s);

 private:
  PPolicy policy_;
  int q_default_;
  std::map<int, int> q_overrides_;
  const EnumerationSchedule* c_;
  Stage last_;
  std::vector<GuessOwner> owners_;
  std::vector<std::vector<GuessEntry>> sets_;
  std::map<std::pair<int, BitString>, CertificationRecord> unresolved_memo_;
};

struct LocalAxiom {
  BitString theta;
  BitString sigma;
  int k = 0;
  Stage defined_at = 0;
  bool live = true;
};

/// Delta_e^C or Gamma_e^C as a list of oracle-string axioms per input.
struct LocalFunctionalOracle {
  std::map<int, std::vector<LocalAxiom>> axioms;

  void cancel() { axioms.clear(); }
  /// Marks dead every axiom whose sigma C has left.
  void expire(const Snapshot& c_now);
  const LocalAxiom* live_axiom(int x, const Snapshot& c_now) const;
};

Outcome eval_local(const LocalFunctionalOracle& loc, const Snapshot& c_now, int x);

struct CertifiedAxiom {
  Axiom axiom;
  Stage certified_at = 0;
};

/// F_e(x) together with the guessing-set index of its current epoch.
struct InputState {
  int epoch = 0;
  std::optional<int> j;
  std::vector<CertifiedAxiom> certified;
};

struct RequirementStateRobinson {
  RequirementId id;
  const FunctionalTable* table = nullptr;
  LocalFunctionalOracle local;
  std::map<int, InputState> inputs;
  std::optional<int> tau;  // tau_s(e) at the last stage the strategy ran
  bool refresh_pending = false;
  int actions = 0;
};

enum class PxReport { kDefinedAlready, kNoComputation, kDeferred, kRefused, kActed };

struct RobinsonAction {
  bool acted = false;
  std::optional<int> tau;
};

struct RefreshedInput {
  RequirementId req;
  int x;
};

class RobinsonStrategy : public Strategy {
 public:
  RobinsonStrategy(std::vector<FunctionalTable> tables, EnumerationSchedule c_schedule, PPolicy policy,
                   int q_default, std::map<int, int> q_overrides, Stage last);

  std::vector<RequirementId> requirements() const override;
  bool run_block(Construction& run, const BlockId& block, std::span<const int> members, Stage s) override;
  void initialize_requirement(Construction& run, const RequirementId& r, Stage s) override;
  void after_changes(Construction& run, Stage s) override;
  void finish(Construction& run) override;

  PxReport run_px(Construction& run, const RequirementId& r, int x, Stage s);
  RobinsonAction run_requirement(Construction& run, const RequirementId& r, Stage s);

  /// Certification for the current epoch of (r, x); throws std::logic_error
  /// when `j` belongs to an older epoch.
  CertificationRecord certify(const RequirementId& r, int x, int j, const Axiom& axiom, Stage s);

  /// Emits injury events for certified axioms whose oracle segment left the
  /// owner's side, then refreshes those inputs and every input of an
  /// initialized requirement.
  std::vector<RefreshedInput> apply_injury_and_refresh(Construction& run, Stage s);

  const RequirementStateRobinson& state(const RequirementId& r) const;
  const GuessingRegistry& registry() const { return registry_; }

 private:
  RequirementStateRobinson& mutable_state(const RequirementId& r);
  int guess_index(RequirementStateRobinson& st, int x);
  void refresh(InputState& in);

  std::vector<FunctionalTable> tables_;
  EnumerationSchedule c_schedule_;
  GuessingRegistry registry_;
  std::map<RequirementId, RequirementStateRobinson> states_;
};

}  // namespace splitsim

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "splitsim/engine.hpp"

namespace splitsim {

/// (sigma, x, k): Delta_e(x) = k was defined when A restricted to the
/// defining stage was sigma.
struct PlainTriple {
  BitString sigma;
  int x = 0;
  int k = 0;
  Stage defined_at = 0;
};

struct LocalFunctionalPlain {
  std::map<int, PlainTriple> triples;

  std::optional<int> value(int x) const;
  void cancel() { triples.clear(); }
};

struct RequirementStateSacks {
  RequirementId id;
  const FunctionalTable* table = nullptr;
  LocalFunctionalPlain local;
  std::optional<std::pair<int, Stage>> diagonalized_at;  // (x, stage)
  std::vector<std::pair<Stage, int>> agreement_history;   // (stage, length) since last initialization
  int actions = 0;
};

struct ActionReport {
  enum Kind { kNone, kDiagonalized, kExpansionary };
  Kind kind = kNone;
  int x = -1;    // diagonalization point
  int ell = -1;  // length of agreement at an expansionary stage

  bool acted() const { return kind != kNone; }
};

struct BlockReport {
  bool acted = false;
  bool expanded = false;
};

/// Strategies for P_e: D = Phi_e^{A0} -> D = Delta_e and symmetrically
/// Q_e: D = Psi_e^{A1} -> D = Gamma_e.
class SacksStrategy : public Strategy {
 public:
  explicit SacksStrategy(std::vector<FunctionalTable> tables);

  std::vector<RequirementId> requirements() const override;
  bool run_block(Construction& run, const BlockId& block, std::span<const int> members, Stage s) override;
  void initialize_requirement(Construction& run, const RequirementId& r, Stage s) override;

  /// Largest y with Phi(x) = D_s(x) for all x <= y, or -1.
  int length_of_agreement(const Construction& run, const RequirementId& r, Stage s) const;
  /// Whether `ell` beats every length recorded since the last
  /// initialization; the empty history counts as -1.
  bool is_expansionary(const RequirementId& r, int ell) const;

  ActionReport run_requirement(Construction& run, const RequirementId& r, Stage s);
  BlockReport run_block_part2(Construction& run, const BlockId& block, std::span<const int> members, Stage s);

  const RequirementStateSacks& state(const RequirementId& r) const;

 private:
  RequirementStateSacks& mutable_state(const RequirementId& r);

  std::vector<FunctionalTable> tables_;
  std::map<RequirementId, RequirementStateSacks> states_;
};

}  // namespace splitsim

#pragma once

// Limit approximations with computably bounded mind changes, and the
// change-set/parity procedure that decides an initial segment of the limit.

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "splitsim/core_model.hpp"

namespace splitsim {

class ApproxError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// f(x, s) for x < width and s in 0..last_stage, with mind-change bounds b(x).
class ApproxTable {
 public:
  /// rows[x][s] = f(x, s). Throws ApproxError when a row does not start at 0,
  /// has the wrong length, or changes b(x) or more times.
  ApproxTable(int last_stage, std::vector<std::vector<std::uint8_t>> rows, std::vector<int> bounds);

  /// Builds rows from per-point flip stages: f(x, s+1) != f(x, s) exactly for
  /// the listed s.
  static ApproxTable from_flips(int last_stage, const std::vector<std::vector<Stage>>& flips,
                                std::vector<int> bounds);

  int last_stage() const { return last_stage_; }
  int width() const { return static_cast<int>(rows_.size()); }
  int value(Natural x, Stage s) const { return rows_[x][s]; }
  int bound(Natural x) const { return bounds_[x]; }
  int mind_changes(Natural x) const;

 private:
  int last_stage_;
  std::vector<std::vector<std::uint8_t>> rows_;
  std::vector<int> bounds_;
};

/// The schedule enumerating pair(x, i-1) at the stage of the i-th mind change.
struct ChangeSet {
  EnumerationSchedule schedule{Role::C};
};

int limit_eval(const ApproxTable& tab, Natural x);

ChangeSet build_change_set(const ApproxTable& tab);

/// {x < n : an odd number of codes pair(x, i), i < d, were enumerated}, where
/// d = max b(x) over x < n and the change set is read at the last stage.
std::vector<Natural> restrict_to(const ApproxTable& tab, Natural n);
std::vector<Natural> restrict_to(const ApproxTable& tab, const ChangeSet& changes, Natural n);

}  // namespace splitsim

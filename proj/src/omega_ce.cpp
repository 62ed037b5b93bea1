#include "splitsim/omega_ce.hpp"

#include <algorithm>
#include <string>

namespace splitsim {

ApproxTable::ApproxTable(int last_stage, std::vector<std::vector<std::uint8_t>> rows,
                         std::vector<int> bounds)
    : last_stage_(last_stage), rows_(std::move(rows)), bounds_(std::move(bounds)) {
  if (last_stage_ < 0) throw ApproxError("negative last stage");
  if (rows_.size() != bounds_.size()) throw ApproxError("rows and bounds differ in width");
  for (std::size_t x = 0; x < rows_.size(); ++x) {
    const auto& row = rows_[x];
    if (row.size() != static_cast<std::size_t>(last_stage_) + 1)
      throw ApproxError("row " + std::to_string(x) + " has wrong length");
    if (row[0] != 0) throw ApproxError("f(" + std::to_string(x) + ",0) must be 0");
    if (bounds_[x] < 1) throw ApproxError("bound for " + std::to_string(x) + " must be positive");
    if (mind_changes(x) >= bounds_[x])
      throw ApproxError("f(" + std::to_string(x) + ",.) changes " + std::to_string(mind_changes(x)) +
                        " times, bound is " + std::to_string(bounds_[x]));
  }
}

ApproxTable ApproxTable::from_flips(int last_stage, const std::vector<std::vector<Stage>>& flips,
                                    std::vector<int> bounds) {
  std::vector<std::vector<std::uint8_t>> rows;
  rows.reserve(flips.size());
  for (const auto& stages : flips) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(last_stage) + 1, 0);
    std::vector<Stage> sorted = stages;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ApproxError("duplicate flip stage");
    if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= last_stage))
      throw ApproxError("flip stage outside 0..last_stage-1");
    std::uint8_t v = 0;
    std::size_t next = 0;
    for (Stage s = 0; s <= last_stage; ++s) {
      row[s] = v;
      while (next < sorted.size() && sorted[next] == s) {
        v ^= 1;
        ++next;
      }
    }
    rows.push_back(std::move(row));
  }
  return ApproxTable(last_stage, std::move(rows), std::move(bounds));
}

int ApproxTable::mind_changes(Natural x) const {
  const auto& row = rows_[x];
  int changes = 0;
  for (std::size_t s = 0; s + 1 < row.size(); ++s)
    if (row[s + 1] != row[s]) ++changes;
  return changes;
}

int limit_eval(const ApproxTable& tab, Natural x) { return tab.value(x, tab.last_stage()); }

ChangeSet build_change_set(const ApproxTable& tab) {
  ChangeSet out;
  for (int x = 0; x < tab.width(); ++x) {
    Natural i = 0;
    for (Stage s = 0; s < tab.last_stage(); ++s) {
      if (tab.value(x, s + 1) != tab.value(x, s)) {
        out.schedule.add(s, pair(x, i));
        ++i;
      }
    }
  }
  return out;
}

std::vector<Natural> restrict_to(const ApproxTable& tab, Natural n) {
  return restrict_to(tab, build_change_set(tab), n);
}

std::vector<Natural> restrict_to(const ApproxTable& tab, const ChangeSet& changes, Natural n) {
  n = std::min<Natural>(n, tab.width());
  Natural d = 0;
  for (Natural x = 0; x < n; ++x) d = std::max<Natural>(d, tab.bound(x));

  // Code the change set up to pair(n, d) as read at the last stage.
  const Natural cap = pair(n, d);
  std::unordered_set<Natural> coded;
  for (const auto& entry : changes.schedule.entries())
    if (entry.stage <= tab.last_stage() && entry.element <= cap) coded.insert(entry.element);

  // The enumerated codes for x are pair(x,0..c-1); c is odd exactly when the
  // last present index is even.
  std::vector<Natural> out;
  for (Natural x = 0; x < n; ++x) {
    for (Natural i = 0; i < d; ++i) {
      if (coded.count(pair(x, i)) && !coded.count(pair(x, i + 1)) && i % 2 == 0) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

}  // namespace splitsim

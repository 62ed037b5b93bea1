#include "splitsim/core_model.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace splitsim {

Natural pair(Natural a, Natural b) {
  const Natural w = a + b;
  return w * (w + 1) / 2 + b;
}

std::pair<Natural, Natural> unpair(Natural n) {
  // w is the largest value with w(w+1)/2 <= n.
  auto w = static_cast<Natural>((std::sqrt(8.0L * static_cast<long double>(n) + 1.0L) - 1.0L) / 2.0L);
  while (w * (w + 1) / 2 > n) --w;
  while ((w + 1) * (w + 2) / 2 <= n) ++w;
  const Natural b = n - w * (w + 1) / 2;
  return {w - b, b};
}

Horizon::Horizon(int last) : last_(last) {
  if (last < 2) throw std::invalid_argument("horizon must be at least 2");
}

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

BitString BitString::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may only contain '0' and '1'");
    bits.push_back(c == '1' ? 1 : 0);
  }
  return BitString(std::move(bits));
}

bool BitString::is_prefix_of(const BitString& other) const {
  return size() <= other.size() && std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
}

std::string BitString::str() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

bool compatible(const BitString& a, const BitString& b) {
  return a.is_prefix_of(b) || b.is_prefix_of(a);
}

std::string_view role_name(Role r) {
  switch (r) {
    case Role::B: return "B";
    case Role::C: return "C";
    case Role::D: return "D";
    case Role::A0: return "A0";
    case Role::A1: return "A1";
    case Role::W: return "W";
  }
  return "?";
}

void Snapshot::insert(Natural x) {
  if (x >= bits_.size()) bits_.resize(x + 1, false);
  if (!bits_[x]) {
    bits_[x] = true;
    ++count_;
  }
}

std::vector<Natural> Snapshot::members() const {
  std::vector<Natural> out;
  out.reserve(count_);
  for (Natural i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

BitString Snapshot::prefix(std::size_t n) const {
  std::vector<std::uint8_t> bits(n, 0);
  for (std::size_t i = 0; i < n; ++i) bits[i] = contains(i) ? 1 : 0;
  return BitString(std::move(bits));
}

void EnumerationSchedule::add(Stage stage, Natural element) {
  if (stage < 0) throw ScheduleError("negative stage");
  if (by_element_.count(element))
    throw ScheduleError("element " + std::to_string(element) + " enumerated twice into " +
                        std::string(role_name(role_)));
  by_element_.emplace(element, stage);
  by_stage_.emplace(stage, element);
}

std::optional<Stage> EnumerationSchedule::stage_of(Natural element) const {
  auto it = by_element_.find(element);
  if (it == by_element_.end()) return std::nullopt;
  return it->second;
}

bool EnumerationSchedule::contains_at(Natural element, Stage s) const {
  auto st = stage_of(element);
  return st && *st <= s;
}

std::vector<EnumerationSchedule::Entry> EnumerationSchedule::entries() const {
  std::vector<Entry> out;
  out.reserve(by_element_.size());
  for (const auto& [stage, element] : by_stage_) out.push_back({stage, element});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Natural> EnumerationSchedule::arrivals_at(Stage s) const {
  std::vector<Natural> out;
  auto [lo, hi] = by_stage_.equal_range(s);
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  std::sort(out.begin(), out.end());
  return out;
}

Stage EnumerationSchedule::last_stage() const {
  return by_stage_.empty() ? -1 : by_stage_.rbegin()->first;
}

Snapshot EnumerationSchedule::snapshot(Stage s) const {
  Snapshot snap(s);
  for (const auto& [stage, element] : by_stage_) {
    if (stage > s) break;
    snap.insert(element);
  }
  return snap;
}

bool in_cone(const BitString& sigma, const Snapshot& snap) {
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma[i] != snap.contains(i)) return false;
  return true;
}

ConeWindow cone_window(const BitString& sigma, const EnumerationSchedule& sched) {
  ConeWindow w{0, INT_MAX};
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    auto st = sched.stage_of(i);
    if (sigma[i]) {
      if (!st) return {INT_MAX, INT_MAX};
      w.from = std::max(w.from, *st);
    } else if (st) {
      w.until = std::min(w.until, *st);
    }
  }
  return w;
}

FunctionalTable::FunctionalTable(FunctionalId id, std::vector<StagedAxiom> axioms)
    : id_(id), axioms_(std::move(axioms)) {
  for (std::size_t i = 0; i < axioms_.size(); ++i) by_input_[axioms_[i].axiom.x].push_back(i);
  for (auto& [x, group] : by_input_) {
    std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      const auto& l = axioms_[a].axiom;
      const auto& r = axioms_[b].axiom;
      return std::pair(l.use(), l.k) < std::pair(r.use(), r.k);
    });
  }
}

bool FunctionalTable::binary() const {
  return !axioms_.empty() && axioms_.front().axiom.sigma.has_value();
}

const StagedAxiom* FunctionalTable::applicable(Stage s, const Snapshot& oracle_a, const Snapshot* oracle_c,
                                               Natural x) const {
  auto it = by_input_.find(x);
  if (it == by_input_.end()) return nullptr;
  for (std::size_t idx : it->second) {
    const auto& staged = axioms_[idx];
    if (staged.appear > s) continue;
    const Axiom& ax = staged.axiom;
    if (!in_cone(ax.theta, oracle_a)) continue;
    if (ax.sigma) {
      if (oracle_c == nullptr || !in_cone(*ax.sigma, *oracle_c)) continue;
    }
    return &staged;
  }
  return nullptr;
}

Outcome FunctionalTable::evaluate(Stage s, const Snapshot& oracle_a, const Snapshot* oracle_c,
                                  Natural x) const {
  const StagedAxiom* hit = applicable(s, oracle_a, oracle_c, x);
  if (hit == nullptr) return Outcome::divergent();
  return Outcome::converge(hit->axiom.k, hit->axiom.use());
}

std::vector<AxiomConflict> validate_consistency(const FunctionalTable& table) {
  std::vector<AxiomConflict> conflicts;
  const auto& axioms = table.axioms();
  for (std::size_t i = 0; i < axioms.size(); ++i) {
    for (std::size_t j = i + 1; j < axioms.size(); ++j) {
      const Axiom& a = axioms[i].axiom;
      const Axiom& b = axioms[j].axiom;
      if (a.x != b.x || a.k == b.k) continue;
      if (!compatible(a.theta, b.theta)) continue;
      if (a.sigma.has_value() != b.sigma.has_value()) continue;
      if (a.sigma && !compatible(*a.sigma, *b.sigma)) continue;
      conflicts.push_back({i, j});
    }
  }
  return conflicts;
}

Outcome evaluate(const FunctionalTable& table, Stage s, const Snapshot& oracle_a,
                 const Snapshot* oracle_c, Natural x) {
  return table.evaluate(s, oracle_a, oracle_c, x);
}

}  // namespace splitsim

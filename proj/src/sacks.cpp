#include "splitsim/sacks.hpp"

#include <algorithm>

namespace splitsim {

std::optional<int> LocalFunctionalPlain::value(int x) const {
  auto it = triples.find(x);
  if (it == triples.end()) return std::nullopt;
  return it->second.k;
}

SacksStrategy::SacksStrategy(std::vector<FunctionalTable> tables) : tables_(std::move(tables)) {
  for (const auto& t : tables_) {
    if (t.binary()) throw std::invalid_argument("Sacks functionals take a single oracle");
    auto [it, inserted] = states_.try_emplace(t.id());
    if (!inserted) throw std::invalid_argument("duplicate functional " + requirement_label(t.id()));
    it->second.id = t.id();
    it->second.table = &t;
  }
}

std::vector<RequirementId> SacksStrategy::requirements() const {
  std::vector<RequirementId> out;
  for (const auto& [id, st] : states_) out.push_back(id);
  return out;
}

const RequirementStateSacks& SacksStrategy::state(const RequirementId& r) const {
  auto it = states_.find(r);
  if (it == states_.end()) throw std::out_of_range("no requirement " + requirement_label(r));
  return it->second;
}

RequirementStateSacks& SacksStrategy::mutable_state(const RequirementId& r) {
  return const_cast<RequirementStateSacks&>(std::as_const(*this).state(r));
}

int SacksStrategy::length_of_agreement(const Construction& run, const RequirementId& r, Stage s) const {
  const auto& st = state(r);
  const Snapshot& oracle = run.world().side_set(r.side);
  const Snapshot& d = run.world().d_now;
  int y = 0;
  for (; y < run.horizon().last(); ++y) {
    const Outcome out = st.table->evaluate(s, oracle, nullptr, y);
    if (!out.convergent || out.k != (d.contains(y) ? 1 : 0)) break;
  }
  return y - 1;
}

bool SacksStrategy::is_expansionary(const RequirementId& r, int ell) const {
  int best = -1;
  for (const auto& [stage, len] : state(r).agreement_history) best = std::max(best, len);
  return ell > best;
}

ActionReport SacksStrategy::run_requirement(Construction& run, const RequirementId& r, Stage s) {
  auto& st = mutable_state(r);
  const auto label = requirement_label(r);
  const Snapshot& d = run.world().d_now;

  if (st.diagonalized_at) return {};

  for (const auto& [x, triple] : st.local.triples) {
    if (triple.k != (d.contains(x) ? 1 : 0)) {
      st.diagonalized_at = std::pair(x, s);
      ++st.actions;
      run.emit(TraceEvent(s, event_kind::kDiagonalize)
                   .set("k", triple.k)
                   .set("req", label)
                   .set("sigma", triple.sigma.str())
                   .set("x", x));
      run.emit(TraceEvent(s, event_kind::kAct).set("block", block_label(run.block_of(r))).set("req", label));
      return {ActionReport::kDiagonalized, x, -1};
    }
  }

  const int ell = length_of_agreement(run, r, s);
  const bool expansionary = is_expansionary(r, ell);
  st.agreement_history.emplace_back(s, ell);
  if (!expansionary) return {};

  ++st.actions;
  run.emit(TraceEvent(s, event_kind::kExpansionary).set("ell", ell).set("req", label));
  const BitString sigma = run.world().side_set(r.side).prefix(static_cast<std::size_t>(s));
  for (int x = 0; x <= ell; ++x) {
    if (st.local.triples.count(x)) continue;
    const int k = d.contains(x) ? 1 : 0;
    st.local.triples.emplace(x, PlainTriple{sigma, x, k, s});
    run.emit(TraceEvent(s, event_kind::kDefineLocal)
                 .set("k", k)
                 .set("req", label)
                 .set("sigma", sigma.str())
                 .set("x", x));
  }
  run.emit(TraceEvent(s, event_kind::kAct).set("block", block_label(run.block_of(r))).set("req", label));
  return {ActionReport::kExpansionary, -1, ell};
}

BlockReport SacksStrategy::run_block_part2(Construction& run, const BlockId& block, std::span<const int> members,
                                           Stage s) {
  BlockReport report;
  const Side side = requirement_side_for(block.side);
  for (int e : members) {
    const ActionReport a = run_requirement(run, {side, e}, s);
    report.acted = report.acted || a.acted();
    report.expanded = report.expanded || a.kind == ActionReport::kExpansionary;
  }
  if (report.expanded) run.set_restraint(block, s, s);
  return report;
}

bool SacksStrategy::run_block(Construction& run, const BlockId& block, std::span<const int> members, Stage s) {
  return run_block_part2(run, block, members, s).acted;
}

void SacksStrategy::initialize_requirement(Construction&, const RequirementId& r, Stage) {
  auto& st = mutable_state(r);
  st.local.cancel();
  st.diagonalized_at.reset();
  st.agreement_history.clear();
}

}  // namespace splitsim

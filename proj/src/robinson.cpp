#include "splitsim/robinson.hpp"

#include <algorithm>

namespace splitsim {

GuessingRegistry::GuessingRegistry(PPolicy policy, int q_default, std::map<int, int> q_overrides,
                                   const EnumerationSchedule* c, Stage last)
    : policy_(std::move(policy)), q_default_(q_default), q_overrides_(std::move(q_overrides)), c_(c), last_(last) {
  if (policy_.kind == PPolicy::kTruthfulDelay && policy_.delay < 0)
    throw std::invalid_argument("p-policy delay must be nonnegative");
  for (auto& [j, stages] : policy_.toggles) {
    std::sort(stages.begin(), stages.end());
    if (!stages.empty() && stages.front() < 1) throw std::invalid_argument("p-table toggles must be at stages >= 1");
    if (std::adjacent_find(stages.begin(), stages.end()) != stages.end())
      throw std::invalid_argument("p-table toggles must be distinct");
  }
}

int GuessingRegistry::allocate(const GuessOwner& owner) {
  owners_.push_back(owner);
  sets_.emplace_back();
  return static_cast<int>(owners_.size()) - 1;
}

int GuessingRegistry::q(int j) const {
  auto it = q_overrides_.find(j);
  return it == q_overrides_.end() ? q_default_ : it->second;
}

bool GuessingRegistry::covers(int j, Stage s) const {
  for (const auto& entry : sets_.at(j))
    if (entry.stage <= s && entry.window.contains(s)) return true;
  return false;
}

void GuessingRegistry::enumerate(int j, const BitString& sigma, Stage s) {
  sets_.at(j).push_back({sigma, s, cone_window(sigma, *c_)});
}

int GuessingRegistry::p(int j, Stage t) const {
  if (policy_.kind == PPolicy::kTable) {
    auto it = policy_.toggles.find(j);
    if (it == policy_.toggles.end()) return 0;
    const auto n = std::upper_bound(it->second.begin(), it->second.end(), t) - it->second.begin();
    return static_cast<int>(n % 2);
  }
  const int d = policy_.delay;
  if (t < std::max(d, 1)) return 0;
  return covers(j, t - d) ? 1 : 0;
}

int GuessingRegistry::truth_x(int j, Stage at) const { return covers(j, at) ? 1 : 0; }

int GuessingRegistry::mind_changes(int j) const {
  int changes = 0;
  for (Stage t = 0; t < last_; ++t)
    if (p(j, t + 1) != p(j, t)) ++changes;
  return changes;
}

CertificationRecord GuessingRegistry::certify(int j, const Axiom& axiom, Stage s) {
  if (!axiom.sigma) throw std::invalid_argument("certification needs an axiom with a C-segment");
  const BitString& sigma = *axiom.sigma;
  if (auto it = unresolved_memo_.find({j, sigma}); it != unresolved_memo_.end()) {
    CertificationRecord rec = it->second;
    rec.axiom = axiom;
    rec.start = s;
    rec.enumerated_sigma = false;
    rec.cached = true;
    return rec;
  }

  CertificationRecord rec;
  rec.axiom = axiom;
  rec.j = j;
  rec.start = s;
  if (!covers(j, s)) {
    enumerate(j, sigma, s);
    rec.enumerated_sigma = true;
  }
  const ConeWindow window = cone_window(sigma, *c_);
  for (Stage t = s; t <= last_; ++t) {
    if (!window.contains(t)) {
      rec.resolution = CertificationRecord::kRefused;
      rec.resolved_at = t;
      break;
    }
    if (p(j, t) == 1) {
      rec.resolution = CertificationRecord::kCertified;
      rec.resolved_at = t;
      break;
    }
  }
  if (rec.resolution != CertificationRecord::kCertified) unresolved_memo_.emplace(std::pair(j, sigma), rec);
  return rec;
}

void LocalFunctionalOracle::expire(const Snapshot& c_now) {
  for (auto& [x, list] : axioms)
    for (auto& ax : list)
      if (ax.live && !in_cone(ax.sigma, c_now)) ax.live = false;
}

const LocalAxiom* LocalFunctionalOracle::live_axiom(int x, const Snapshot& c_now) const {
  auto it = axioms.find(x);
  if (it == axioms.end()) return nullptr;
  for (const auto& ax : it->second)
    if (ax.live && in_cone(ax.sigma, c_now)) return &ax;
  return nullptr;
}

Outcome eval_local(const LocalFunctionalOracle& loc, const Snapshot& c_now, int x) {
  const LocalAxiom* ax = loc.live_axiom(x, c_now);
  if (ax == nullptr) return Outcome::divergent();
  return Outcome::converge(ax->k, ax->sigma.size());
}

RobinsonStrategy::RobinsonStrategy(std::vector<FunctionalTable> tables, EnumerationSchedule c_schedule,
                                   PPolicy policy, int q_default, std::map<int, int> q_overrides, Stage last)
    : tables_(std::move(tables)),
      c_schedule_(std::move(c_schedule)),
      registry_(std::move(policy), q_default, std::move(q_overrides), &c_schedule_, last) {
  for (const auto& t : tables_) {
    for (const auto& staged : t.axioms())
      if (!staged.axiom.sigma) throw std::invalid_argument("Robinson functionals need a C-segment on every axiom");
    auto [it, inserted] = states_.try_emplace(t.id());
    if (!inserted) throw std::invalid_argument("duplicate functional " + requirement_label(t.id()));
    it->second.id = t.id();
    it->second.table = &t;
  }
}

std::vector<RequirementId> RobinsonStrategy::requirements() const {
  std::vector<RequirementId> out;
  for (const auto& [id, st] : states_) out.push_back(id);
  return out;
}

const RequirementStateRobinson& RobinsonStrategy::state(const RequirementId& r) const {
  auto it = states_.find(r);
  if (it == states_.end()) throw std::out_of_range("no requirement " + requirement_label(r));
  return it->second;
}

RequirementStateRobinson& RobinsonStrategy::mutable_state(const RequirementId& r) {
  return const_cast<RequirementStateRobinson&>(std::as_const(*this).state(r));
}

int RobinsonStrategy::guess_index(RequirementStateRobinson& st, int x) {
  InputState& in = st.inputs[x];
  if (!in.j) in.j = registry_.allocate({st.id, x, in.epoch});
  return *in.j;
}

void RobinsonStrategy::refresh(InputState& in) {
  ++in.epoch;
  in.j.reset();
  in.certified.clear();
}

CertificationRecord RobinsonStrategy::certify(const RequirementId& r, int x, int j, const Axiom& axiom, Stage s) {
  const auto& st = state(r);
  auto it = st.inputs.find(x);
  const GuessOwner& owner = registry_.owner(j);
  if (it == st.inputs.end() || !it->second.j || *it->second.j != j || owner.epoch != it->second.epoch ||
      owner.req != r || owner.x != x)
    throw std::logic_error("stale guessing set " + std::to_string(j) + " for " + requirement_label(r) + "(" +
                           std::to_string(x) + ")");
  return registry_.certify(j, axiom, s);
}

PxReport RobinsonStrategy::run_px(Construction& run, const RequirementId& r, int x, Stage s) {
  auto& st = mutable_state(r);
  const World& w = run.world();
  const int dx = w.d_now.contains(x) ? 1 : 0;
  const StagedAxiom* hit = st.table->applicable(s, w.side_set(r.side), &w.c_now, x);
  if (hit == nullptr || hit->axiom.k != dx) return PxReport::kNoComputation;
  if (eval_local(st.local, w.c_now, x).convergent) return PxReport::kDefinedAlready;

  const Axiom& axiom = hit->axiom;
  if (s <= static_cast<Stage>(axiom.theta.size())) return PxReport::kDeferred;

  const int j = guess_index(st, x);
  const CertificationRecord rec = certify(r, x, j, axiom, s);
  const auto label = requirement_label(r);
  TraceEvent ev(s, rec.resolution == CertificationRecord::kCertified ? event_kind::kCertify
                                                                     : event_kind::kRefuseCertify);
  ev.set("j", j)
      .set("k", axiom.k)
      .set("req", label)
      .set("resolved", rec.resolved_at)
      .set("sigma", axiom.sigma->str())
      .set("theta", axiom.theta.str())
      .set("wj", rec.enumerated_sigma ? 1 : 0)
      .set("x", x);
  if (rec.resolution != CertificationRecord::kCertified) {
    ev.set("cached", rec.cached ? 1 : 0);
    ev.set("outcome", rec.resolution == CertificationRecord::kRefused ? "refused" : "pending");
  }
  run.emit(std::move(ev));

  if (rec.resolution == CertificationRecord::kPending && !rec.cached) {
    run.emit(TraceEvent(s, event_kind::kFlag)
                 .set("flag", "unsettled")
                 .set("j", j)
                 .set("reason", "scan-exhausted")
                 .set("req", label)
                 .set("x", x));
  }
  if (rec.resolution != CertificationRecord::kCertified) return PxReport::kRefused;

  st.inputs[x].certified.push_back({axiom, s});
  st.local.axioms[x].push_back({axiom.theta, *axiom.sigma, axiom.k, s, true});
  run.emit(TraceEvent(s, event_kind::kDefineLocal)
               .set("k", axiom.k)
               .set("req", label)
               .set("sigma", axiom.sigma->str())
               .set("theta", axiom.theta.str())
               .set("x", x));
  return PxReport::kActed;
}

RobinsonAction RobinsonStrategy::run_requirement(Construction& run, const RequirementId& r, Stage s) {
  auto& st = mutable_state(r);
  RobinsonAction action;
  int x = 0;
  for (; x < s; ++x) {
    const PxReport rep = run_px(run, r, x, s);
    if (rep == PxReport::kActed) {
      action.acted = true;
      continue;
    }
    if (rep == PxReport::kDefinedAlready) continue;
    action.tau = x;
    break;
  }
  st.tau = action.tau;

  const Snapshot& c = run.world().c_now;
  const Snapshot& d = run.world().d_now;
  const int bound = action.tau.value_or(s);
  for (int y = 0; y < bound; ++y) {
    const Outcome out = eval_local(st.local, c, y);
    if (!out.convergent || out.k != (d.contains(y) ? 1 : 0))
      throw InvariantViolation(s, requirement_label(r) + " left input " + std::to_string(y) +
                                      " below tau without a matching local value");
  }

  if (action.acted) {
    ++st.actions;
    run.emit(TraceEvent(s, event_kind::kAct).set("block", block_label(run.block_of(r))).set("req", requirement_label(r)));
  }
  return action;
}

bool RobinsonStrategy::run_block(Construction& run, const BlockId& block, std::span<const int> members, Stage s) {
  const Side side = requirement_side_for(block.side);
  bool acted = false;
  for (int e : members) acted = run_requirement(run, {side, e}, s).acted || acted;
  if (acted) run.set_restraint(block, s, s);
  return acted;
}

void RobinsonStrategy::initialize_requirement(Construction&, const RequirementId& r, Stage) {
  auto& st = mutable_state(r);
  st.local.cancel();
  st.tau.reset();
  st.refresh_pending = true;
}

std::vector<RefreshedInput> RobinsonStrategy::apply_injury_and_refresh(Construction& run, Stage s) {
  std::vector<RefreshedInput> refreshed;
  const World& w = run.world();
  for (auto& [id, st] : states_) {
    const Snapshot& own = w.side_set(id.side);
    for (auto& [x, in] : st.inputs) {
      bool injured = false;
      for (const auto& cert : in.certified) {
        if (in_cone(cert.axiom.theta, own)) continue;
        injured = true;
        run.emit(TraceEvent(s, event_kind::kInjury)
                     .set("certified", cert.certified_at)
                     .set("j", in.j.value_or(-1))
                     .set("k", cert.axiom.k)
                     .set("req", requirement_label(id))
                     .set("sigma", cert.axiom.sigma->str())
                     .set("theta", cert.axiom.theta.str())
                     .set("x", x));
      }
      if (injured || st.refresh_pending) {
        if (injured) st.local.axioms.erase(x);
        refresh(in);
        refreshed.push_back({id, x});
      }
    }
    st.refresh_pending = false;
  }
  return refreshed;
}

void RobinsonStrategy::after_changes(Construction& run, Stage s) {
  apply_injury_and_refresh(run, s);
  for (auto& [id, st] : states_) st.local.expire(run.world().c_now);
}

void RobinsonStrategy::finish(Construction& run) {
  const Stage last = run.horizon().last();
  for (int j = 0; j < registry_.issued(); ++j) {
    const GuessOwner& owner = registry_.owner(j);
    if (registry_.p(j, last) != registry_.truth_x(j, last)) {
      run.emit(TraceEvent(last, event_kind::kFlag)
                   .set("flag", "unsettled")
                   .set("j", j)
                   .set("reason", "p-unstable")
                   .set("req", requirement_label(owner.req))
                   .set("x", owner.x));
    }
    const int changes = registry_.mind_changes(j);
    if (changes > registry_.q(j)) {
      run.emit(TraceEvent(last, event_kind::kFlag)
                   .set("changes", changes)
                   .set("flag", "p-contract-violated")
                   .set("j", j)
                   .set("q", registry_.q(j)));
    }
  }
}

}  // namespace splitsim

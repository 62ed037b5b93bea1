#include "splitsim/verifier.hpp"

#include <algorithm>
#include <climits>
#include <functional>

#include "splitsim/omega_ce.hpp"

namespace splitsim {

namespace {

struct CheckSpec {
  const char* id;
  const char* name;
};

constexpr CheckSpec kChecks[] = {
    {"V1", "partition"},
    {"V2", "monotonicity"},
    {"V3", "assignment-monotonicity"},
    {"V4", "restraint-integrity"},
    {"V5", "diagonalization-persistence"},
    {"V6", "injury-discipline"},
    {"V7", "certification-soundness"},
    {"V8", "p-contract"},
    {"V9", "local-global-coherence"},
    {"V10", "omega-ce-equivalence"},
    {"V11", "update-consistency"},
};

/// Thrown inside a check to report a failure with its witness.
struct Violation {
  Stage stage;
  std::vector<std::size_t> events;
  std::string message;
};

struct Skip {
  std::string reason;
};

[[noreturn]] void violate(Stage stage, std::vector<std::size_t> events, std::string message) {
  throw Violation{stage, std::move(events), std::move(message)};
}

/// Block indices per requirement index, replayed from assignment-update events.
class AssignmentReplay {
 public:
  explicit AssignmentReplay(int width) : lam_(width), mu_(width) {
    for (int e = 0; e < width; ++e) lam_[e] = mu_[e] = e;
  }

  int get(Side side, int e) const {
    const auto& r = side == Side::P ? lam_ : mu_;
    const int last = static_cast<int>(r.size()) - 1;
    return e <= last ? r[e] : r[last] + (e - last);
  }

  /// Greatest index assigned to block i, or -1.
  int tail(Side side, int i) const {
    const auto& r = side == Side::P ? lam_ : mu_;
    const int last = static_cast<int>(r.size()) - 1;
    if (i > r[last]) return last + (i - r[last]);
    for (int e = last; e >= 0; --e)
      if (r[e] == i) return e;
    return -1;
  }

  /// Returns the first index whose value would rise, if any.
  std::optional<std::pair<int, std::pair<int, int>>> apply(Side side, int i, int tail, Stage s) {
    auto& r = side == Side::P ? lam_ : mu_;
    std::optional<std::pair<int, std::pair<int, int>>> rise;
    for (int j = std::max(tail + 1, 0); j < static_cast<int>(r.size()); ++j) {
      const int next = j <= s ? i : i + (j - s);
      if (next > r[j] && !rise) rise = std::pair(j, std::pair(r[j], next));
      r[j] = next;
    }
    return rise;
  }

  const std::vector<int>& row(Side side) const { return side == Side::P ? lam_ : mu_; }

 private:
  std::vector<int> lam_, mu_;
};

BlockId parse_block(const TraceEvent& ev) {
  auto b = parse_block_label(ev.get("block"));
  if (!b) throw TraceParseError("bad block label '" + ev.get("block") + "'");
  return *b;
}

RequirementId parse_req(const TraceEvent& ev) {
  auto r = parse_requirement_label(ev.get("req"));
  if (!r) throw TraceParseError("bad requirement label '" + ev.get("req") + "'");
  return *r;
}

/// Everything replayed once and shared by the checks.
struct Context {
  const Scenario& sc;
  const Trace& trace;
  const FinalState* final;
  int H;
  int width;
  bool robinson;
  std::vector<std::vector<std::size_t>> at;  // event indices per stage
  std::map<FunctionalId, const FunctionalTable*> tables;
  std::vector<FunctionalId> tracked;
  std::map<FunctionalId, int> tracked_index;

  // End-of-stage snapshots, indexed 0..H.
  std::vector<Snapshot> a0, a1, b, c, d;
  EnumerationSchedule c_sched{Role::C};

  std::vector<std::vector<int>> block_before;  // [stage][tracked] block index before the stage's update
  std::vector<std::vector<bool>> covered;      // [stage][tracked] initialized at that stage
  std::vector<int> lambda_final, mu_final;

  Context(const Scenario& scenario, const Trace& t, const FinalState* f)
      : sc(scenario),
        trace(t),
        final(f),
        H(scenario.horizon),
        width(scenario.horizon + 2),
        robinson(scenario.construction == ConstructionKind::Robinson),
        at(scenario.horizon + 1) {
    for (const auto& table : sc.functionals) {
      tables[table.id()] = &table;
      tracked_index[table.id()] = static_cast<int>(tracked.size());
      tracked.push_back(table.id());
    }
    for (std::size_t i = 0; i < trace.size(); ++i)
      if (trace[i].stage >= 0 && trace[i].stage <= H) at[trace[i].stage].push_back(i);
    for (const auto& a : sc.c) c_sched.add(a.stage, static_cast<Natural>(a.element));
    build_sets();
    build_assignments();
  }

  const Snapshot& side_set(Side side, Stage s) const { return side == Side::P ? a0[s] : a1[s]; }

  bool is_covered(Stage s, const RequirementId& r) const {
    auto it = tracked_index.find(r);
    return it != tracked_index.end() && covered[s][it->second];
  }

  int order_of(const RequirementId& r, Stage s) const {
    const int i = block_before[s][tracked_index.at(r)];
    return priority_order({block_side_for(r.side), i});
  }

 private:
  void build_sets() {
    Snapshot sa0, sa1, sb, sd;
    Snapshot sc_now;
    std::map<Stage, std::vector<Natural>> c_by_stage;
    for (const auto& a : sc.c) c_by_stage[a.stage].push_back(a.element);
    for (Stage s = 0; s <= H; ++s) {
      for (std::size_t idx : at[s]) {
        const TraceEvent& ev = trace[idx];
        if (ev.kind == event_kind::kRoute) {
          const auto x = static_cast<Natural>(ev.get_int("element"));
          (ev.get("target") == "A1" ? sa1 : sa0).insert(x);
        } else if (ev.kind == event_kind::kEnumerate) {
          const auto x = static_cast<Natural>(ev.get_int("element"));
          const std::string& set = ev.get("set");
          if (set == "B") sb.insert(x);
          if (set == "D") sd.insert(x);
        }
      }
      if (robinson)
        if (auto it = c_by_stage.find(s); it != c_by_stage.end())
          for (Natural x : it->second) sc_now.insert(x);
      a0.push_back(sa0);
      a1.push_back(sa1);
      b.push_back(sb);
      c.push_back(sc_now);
      d.push_back(sd);
    }
  }

  void build_assignments() {
    AssignmentReplay replay(width);
    block_before.assign(H + 1, std::vector<int>(tracked.size()));
    covered.assign(H + 1, std::vector<bool>(tracked.size(), false));
    for (Stage s = 0; s <= H; ++s) {
      for (std::size_t r = 0; r < tracked.size(); ++r) block_before[s][r] = replay.get(tracked[r].side, tracked[r].e);
      for (std::size_t idx : at[s]) {
        const TraceEvent& ev = trace[idx];
        if (ev.kind == event_kind::kInitialize) {
          const int order = priority_order(parse_block(ev));
          for (std::size_t r = 0; r < tracked.size(); ++r)
            if (order <= priority_order({block_side_for(tracked[r].side), block_before[s][r]})) covered[s][r] = true;
        } else if (ev.kind == event_kind::kAssignmentUpdate && ev.get("block") != "none") {
          const BlockId blk = parse_block(ev);
          replay.apply(requirement_side_for(blk.side), blk.index, static_cast<int>(ev.get_int("tail")), s);
        }
      }
    }
    lambda_final = replay.row(Side::P);
    mu_final = replay.row(Side::Q);
  }
};

// V1: A0 and A1 split B at every stage.
void check_partition(const Context& cx) {
  std::map<Natural, std::size_t> routed;
  std::map<Stage, std::set<Natural>> scenario_b;
  for (const auto& a : cx.sc.b) scenario_b[a.stage].insert(a.element);
  std::set<Natural> b_so_far;
  for (Stage s = 0; s <= cx.H; ++s) {
    std::set<Natural> arrivals, routes;
    std::vector<std::size_t> route_events;
    for (std::size_t idx : cx.at[s]) {
      const TraceEvent& ev = cx.trace[idx];
      if (ev.kind == event_kind::kEnumerate && ev.get("set") == "B") arrivals.insert(ev.get_int("element"));
      if (ev.kind != event_kind::kRoute) continue;
      const auto x = static_cast<Natural>(ev.get_int("element"));
      const std::string& target = ev.get("target");
      if (target != "A0" && target != "A1") violate(s, {idx}, "route target must be A0 or A1");
      if (auto [it, fresh] = routed.emplace(x, idx); !fresh)
        violate(s, {it->second, idx}, "element " + std::to_string(x) + " routed twice");
      routes.insert(x);
      route_events.push_back(idx);
    }
    if (auto it = scenario_b.find(s); it != scenario_b.end()) b_so_far.insert(it->second.begin(), it->second.end());
    if (routes != arrivals)
      violate(s, route_events, "routed elements differ from the B-arrivals of the stage");
    for (Natural x : b_so_far) {
      const bool in0 = cx.a0[s].contains(x), in1 = cx.a1[s].contains(x);
      if (in0 == in1)
        violate(s, route_events, "element " + std::to_string(x) + (in0 ? " lies in both halves" : " lies in neither half"));
    }
    if (cx.a0[s].size() + cx.a1[s].size() != b_so_far.size())
      violate(s, route_events, "A0 and A1 hold elements outside B");
  }
}

// V2: stage order, single enumeration per element, schedules match the scenario.
void check_monotonicity(const Context& cx) {
  Stage prev = 0;
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const Stage s = cx.trace[i].stage;
    if (s < prev || s > cx.H) violate(s, {i}, "event out of stage order");
    prev = s;
  }
  std::map<std::string, std::map<Natural, std::size_t>> seen;
  std::map<std::string, std::vector<ArrivalSpec>> enumerated;
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    if (ev.kind != event_kind::kEnumerate) continue;
    const std::string& set = ev.get("set");
    if (set != "B" && set != "C" && set != "D") violate(ev.stage, {i}, "unknown set '" + set + "'");
    const auto x = static_cast<Natural>(ev.get_int("element"));
    if (auto [it, fresh] = seen[set].emplace(x, i); !fresh)
      violate(ev.stage, {it->second, i}, set + " enumerates " + std::to_string(x) + " twice");
    enumerated[set].push_back({ev.stage, static_cast<int>(x)});
  }
  auto same = [](std::vector<ArrivalSpec> a, std::vector<ArrivalSpec> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  };
  if (!same(enumerated["B"], cx.sc.b)) violate(0, {}, "B enumerations differ from the scenario schedule");
  if (!same(enumerated["C"], cx.robinson ? cx.sc.c : std::vector<ArrivalSpec>{}))
    violate(0, {}, "C enumerations differ from the scenario schedule");
  if (!cx.sc.d_policy && !same(enumerated["D"], cx.sc.d))
    violate(0, {}, "D enumerations differ from the scenario schedule");

  std::map<long long, std::set<std::string>> guesses;
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    if ((ev.kind == event_kind::kCertify || ev.kind == event_kind::kRefuseCertify) && ev.get_int("wj") == 1)
      if (!guesses[ev.get_int("j")].insert(ev.get("sigma")).second)
        violate(ev.stage, {i}, "sigma enumerated into W_" + std::to_string(ev.get_int("j")) + " twice");
  }
  for (Stage s = 1; s <= cx.H; ++s) {
    for (const auto* sets : {&cx.a0, &cx.a1, &cx.b, &cx.d})
      for (Natural x : (*sets)[s - 1].members())
        if (!(*sets)[s].contains(x)) violate(s, {}, "a set lost element " + std::to_string(x));
  }
}

// V3: lambda_s <= lambda_{s-1}, mu_s <= mu_{s-1}.
void check_assignment_monotonicity(const Context& cx) {
  AssignmentReplay replay(cx.width);
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    if (ev.kind != event_kind::kAssignmentUpdate || ev.get("block") == "none") continue;
    const BlockId blk = parse_block(ev);
    const Side side = requirement_side_for(blk.side);
    if (auto rise = replay.apply(side, blk.index, static_cast<int>(ev.get_int("tail")), ev.stage)) {
      violate(ev.stage, {i},
              std::string(side == Side::P ? "lambda(P_" : "mu(Q_") + std::to_string(rise->first) + ") rises from " +
                  std::to_string(rise->second.first) + " to " + std::to_string(rise->second.second));
    }
  }
}

// V4: routing recomputed from replayed restraints, restraint integrity, and
// attribution of every initialization to one route or act.
void check_restraint_integrity(const Context& cx) {
  std::map<BlockId, int> restraint;
  struct Pending {
    Stage stage;
    BlockId block;
    std::size_t cause;
    std::string kind;
  };
  std::optional<Pending> pending;
  std::map<Stage, std::set<BlockId>> acted;  // blocks with act events per stage

  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    if (pending && !(ev.kind == event_kind::kInitialize)) {
      violate(pending->stage, {pending->cause, i}, "missing initialization after " + pending->kind);
    }
    if (ev.kind == event_kind::kRestraintSet) {
      restraint[parse_block(ev)] = static_cast<int>(ev.get_int("value"));
    } else if (ev.kind == event_kind::kAct) {
      acted[ev.stage].insert(parse_block(ev));
    } else if (ev.kind == event_kind::kRoute) {
      const long long x = ev.get_int("element");
      std::optional<BlockId> strongest;
      for (const auto& [blk, r] : restraint)
        if (x <= r && (!strongest || priority_order(blk) < priority_order(*strongest))) strongest = blk;
      const std::string expected_target = strongest && strongest->side == BlockSide::Lambda ? "A1" : "A0";
      if (ev.get("target") != expected_target)
        violate(ev.stage, {i}, "element " + std::to_string(x) + " should have gone to " + expected_target);
      const auto claimed = ev.find("block");
      if (claimed.has_value() != strongest.has_value() || (strongest && *claimed != block_label(*strongest)))
        violate(ev.stage, {i}, "threatened block differs from the recomputed one");
      std::optional<BlockId> init;
      if (strongest)
        init = strongest->side == BlockSide::Lambda ? BlockId{BlockSide::Upsilon, strongest->index}
                                                     : BlockId{BlockSide::Lambda, strongest->index + 1};
      const BlockSide restrained = expected_target == "A0" ? BlockSide::Lambda : BlockSide::Upsilon;
      for (const auto& [blk, r] : restraint) {
        if (blk.side != restrained || x > r) continue;
        if (!init || priority_order(blk) < priority_order(*init))
          violate(ev.stage, {i}, "element " + std::to_string(x) + " enters below the restraint " + std::to_string(r) +
                                     " of " + block_label(blk));
      }
      if (init) pending = Pending{ev.stage, *init, i, "route"};
    } else if (ev.kind == event_kind::kPart2End) {
      if (ev.get("reason") == "acted") {
        const BlockId blk = parse_block(ev);
        if (!acted[ev.stage].count(blk)) violate(ev.stage, {i}, "Part II ended as acted without an act event");
        pending = Pending{ev.stage, block_at_order(priority_order(blk) + 1), i, "act"};
      }
    } else if (ev.kind == event_kind::kInitialize) {
      const BlockId blk = parse_block(ev);
      const std::string& cause = ev.get("cause");
      if (!pending || pending->stage != ev.stage || pending->block != blk || pending->kind != cause)
        violate(ev.stage, {i}, "initialization of " + block_label(blk) + " has no matching " + cause);
      pending.reset();
      for (auto& [b, r] : restraint)
        if (priority_order(b) >= priority_order(blk)) r = -1;
    }
  }
  if (pending) violate(pending->stage, {pending->cause}, "missing initialization after " + pending->kind);
}

// V5: an uninitialized diagonalization still holds at the horizon.
void check_diagonalization(const Context& cx) {
  if (cx.robinson) throw Skip{"no diagonalize events in the certification construction"};
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    if (ev.kind != event_kind::kDiagonalize) continue;
    const RequirementId r = parse_req(ev);
    const auto table = cx.tables.find(r);
    if (table == cx.tables.end()) violate(ev.stage, {i}, "diagonalization by an untracked requirement");
    const int x = static_cast<int>(ev.get_int("x"));
    const int k = static_cast<int>(ev.get_int("k"));
    if (k == (cx.d[ev.stage].contains(x) ? 1 : 0)) violate(ev.stage, {i}, "local value agrees with D");
    bool reinitialized = false;
    for (Stage u = ev.stage + 1; u <= cx.H && !reinitialized; ++u) reinitialized = cx.is_covered(u, r);
    if (reinitialized) continue;
    const BitString sigma = BitString::parse(ev.get("sigma"));
    const Snapshot& a = cx.side_set(r.side, cx.H);
    if (!in_cone(sigma, a)) violate(cx.H, {i}, "the oracle left the preserved segment");
    const Outcome out = table->second->evaluate(cx.H, a, nullptr, x);
    if (!out.convergent || out.k != k) violate(cx.H, {i}, "the functional no longer computes the preserved value");
    if (k == (cx.d[cx.H].contains(x) ? 1 : 0)) violate(cx.H, {i}, "D caught up with the diagonalization");
  }
}

// V6: each injury coincides with an initialization covering its owner.
void check_injury(const Context& cx) {
  if (!cx.robinson) throw Skip{"no certified computations in the Sacks construction"};
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    if (ev.kind != event_kind::kInjury) continue;
    const RequirementId r = parse_req(ev);
    if (!cx.is_covered(ev.stage, r))
      violate(ev.stage, {i}, "injury of " + requirement_label(r) + " without initialization");
    if (in_cone(BitString::parse(ev.get("theta")), cx.side_set(r.side, ev.stage)))
      violate(ev.stage, {i}, "reported injury, but the oracle segment is intact");
  }
}

/// The p-approximation recomputed from the scenario and the W_j enumerations
/// published in the trace.
class PReplay {
 public:
  PReplay(const Context& cx) : cx_(cx) {
    for (std::size_t i = 0; i < cx.trace.size(); ++i) {
      const TraceEvent& ev = cx.trace[i];
      if (ev.kind != event_kind::kCertify && ev.kind != event_kind::kRefuseCertify) continue;
      const int j = static_cast<int>(ev.get_int("j"));
      issued_.insert(j);
      if (ev.get_int("wj") == 1) {
        const BitString sigma = BitString::parse(ev.get("sigma"));
        w_[j].push_back({ev.stage, cone_window(sigma, cx.c_sched), i});
      }
    }
  }

  struct Entry {
    Stage stage;
    ConeWindow window;
    std::size_t event;
  };

  const std::set<int>& issued() const { return issued_; }

  /// C_s in [W_j] using entries enumerated by stage s and before event `before`.
  bool covers(int j, Stage s, std::size_t before = SIZE_MAX) const {
    auto it = w_.find(j);
    if (it == w_.end()) return false;
    for (const auto& e : it->second)
      if (e.stage <= s && e.event < before && e.window.contains(s)) return true;
    return false;
  }

  int p(int j, Stage t) const {
    const PPolicy& policy = cx_.sc.p_policy;
    if (policy.kind == PPolicy::kTable) {
      auto it = policy.toggles.find(j);
      if (it == policy.toggles.end()) return 0;
      int v = 0;
      for (Stage u : it->second)
        if (u <= t) v ^= 1;
      return v;
    }
    const int d = policy.delay;
    if (t < d || t == 0) return 0;
    return covers(j, t - d) ? 1 : 0;
  }

  int truth(int j, Stage t) const { return covers(j, t) ? 1 : 0; }

  int q(int j) const {
    auto it = cx_.sc.q_overrides.find(j);
    return it == cx_.sc.q_overrides.end() ? cx_.sc.q_default : it->second;
  }

  int changes(int j) const {
    int n = 0;
    for (Stage t = 0; t < cx_.H; ++t)
      if (p(j, t) != p(j, t + 1)) ++n;
    return n;
  }

 private:
  const Context& cx_;
  std::set<int> issued_;
  std::map<int, std::vector<Entry>> w_;
};

// V7: certification windows and refusal witnesses, plus W_j bookkeeping.
void check_certification(const Context& cx) {
  if (!cx.robinson) throw Skip{"no certification in the Sacks construction"};
  const PReplay p(cx);
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    const bool certified = ev.kind == event_kind::kCertify;
    if (!certified && ev.kind != event_kind::kRefuseCertify) continue;
    const Stage s = ev.stage;
    const int j = static_cast<int>(ev.get_int("j"));
    const RequirementId r = parse_req(ev);
    const BitString theta = BitString::parse(ev.get("theta"));
    const BitString sigma = BitString::parse(ev.get("sigma"));
    const int x = static_cast<int>(ev.get_int("x"));
    const int k = static_cast<int>(ev.get_int("k"));
    const Stage t = static_cast<Stage>(ev.get_int("resolved"));
    const ConeWindow window = cone_window(sigma, cx.c_sched);

    auto table = cx.tables.find(r);
    if (table == cx.tables.end()) violate(s, {i}, "certification for an untracked requirement");
    const Snapshot& a = cx.side_set(r.side, s);
    if (!in_cone(theta, a) || !in_cone(sigma, cx.c[s])) violate(s, {i}, "the axiom does not apply at its stage");
    const Outcome out = table->second->evaluate(s, a, &cx.c[s], static_cast<Natural>(x));
    if (!out.convergent || out.k != k) violate(s, {i}, "the functional does not compute the certified value");
    if (k != (cx.d[s].contains(x) ? 1 : 0)) violate(s, {i}, "certification attempted for a value that disagrees with D");

    const bool cached = !certified && ev.get_int("cached") == 1;
    if (!cached) {
      const bool should_enumerate = !p.covers(j, s, i);
      if (should_enumerate != (ev.get_int("wj") == 1))
        violate(s, {i}, should_enumerate ? "sigma should have been enumerated into W_j" : "W_j already covered C_s");
    } else if (ev.get_int("wj") != 0) {
      violate(s, {i}, "a cached answer cannot enumerate into W_j");
    }

    if (certified) {
      if (t < s || t > cx.H) violate(s, {i}, "resolution stage outside [s, H]");
      if (!(window.from <= s && window.until > t)) violate(s, {i}, "C leaves the cone inside the certification window");
      if (p.p(j, t) != 1) violate(s, {i}, "p(j, t) = 0 at the certifying stage");
      continue;
    }
    const std::string& outcome = ev.get("outcome");
    if (outcome == "refused") {
      if (t < s || t > cx.H) violate(s, {i}, "resolution stage outside [s, H]");
      if (window.contains(t)) violate(s, {i}, "refusal without a cone exit at the resolving stage");
      if (!(window.from <= s && window.until >= t)) violate(s, {i}, "the cone was left before the recorded exit");
    } else if (outcome == "pending") {
      if (window.until <= cx.H) violate(s, {i}, "pending certification although C left the cone by the horizon");
    } else {
      violate(s, {i}, "unknown refusal outcome '" + outcome + "'");
    }
  }
}

// V8: p(j,0) = 0, at most q(j) changes, published flags agree with the
// recomputation, and settled runs end with p(j,H) equal to the truth.
void check_p_contract(const Context& cx) {
  if (!cx.robinson) throw Skip{"no guessing sets in the Sacks construction"};
  const PReplay p(cx);
  using Key = std::tuple<std::string, std::string, long long>;
  std::set<Key> expected, published;
  std::vector<std::size_t> flag_events;
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    if (ev.kind == event_kind::kFlag) {
      flag_events.push_back(i);
      published.emplace(ev.get("flag"), ev.find("reason").value_or(""), ev.get_int("j"));
    } else if (ev.kind == event_kind::kRefuseCertify && ev.get("outcome") == "pending" && ev.get_int("cached") == 0) {
      expected.emplace("unsettled", "scan-exhausted", ev.get_int("j"));
    }
  }
  for (int j : p.issued()) {
    if (p.p(j, 0) != 0) violate(0, {}, "p(" + std::to_string(j) + ", 0) = 1");
    if (p.changes(j) > p.q(j)) expected.emplace("p-contract-violated", "", j);
    if (p.p(j, cx.H) != p.truth(j, cx.H)) expected.emplace("unsettled", "p-unstable", j);
  }
  if (expected != published) {
    std::vector<Key> diff;
    std::set_symmetric_difference(expected.begin(), expected.end(), published.begin(), published.end(),
                                  std::back_inserter(diff));
    const auto& [flag, reason, j] = diff.front();
    violate(cx.H, flag_events,
            "flag " + flag + (reason.empty() ? "" : "/" + reason) + " for j=" + std::to_string(j) +
                (expected.count(diff.front()) ? " is missing" : " is not supported by the replay"));
  }
  for (const auto& [flag, reason, j] : expected)
    if (flag == "p-contract-violated")
      violate(cx.H, flag_events, "p(" + std::to_string(j) + ", .) changes more than q(j) times");
  const bool settled = std::none_of(expected.begin(), expected.end(),
                                    [](const Key& k) { return std::get<0>(k) == "unsettled"; });
  if (settled)
    for (int j : p.issued())
      if (p.p(j, cx.H) != p.truth(j, cx.H)) violate(cx.H, {}, "settled run with p(j, H) != X(j)");
}

// V9: while a local value is live and its owner uninitialized, the global
// functional computes the same value.
void check_coherence(const Context& cx) {
  for (std::size_t i = 0; i < cx.trace.size(); ++i) {
    const TraceEvent& ev = cx.trace[i];
    if (ev.kind != event_kind::kDefineLocal) continue;
    const RequirementId r = parse_req(ev);
    auto table = cx.tables.find(r);
    if (table == cx.tables.end()) violate(ev.stage, {i}, "local value for an untracked requirement");
    const int x = static_cast<int>(ev.get_int("x"));
    const int k = static_cast<int>(ev.get_int("k"));
    const BitString sigma = BitString::parse(ev.get("sigma"));
    if (k != (cx.d[ev.stage].contains(x) ? 1 : 0)) violate(ev.stage, {i}, "local value defined against D");
    if (cx.robinson) {
      const BitString theta = BitString::parse(ev.get("theta"));
      for (Stage v = ev.stage; v <= cx.H; ++v) {
        if (v > ev.stage && cx.is_covered(v, r)) break;
        if (!in_cone(sigma, cx.c[v])) break;  // the local axiom is dead from here on
        const Snapshot& a = cx.side_set(r.side, v);
        if (!in_cone(theta, a)) violate(v, {i}, "certified oracle segment changed while the local value is live");
        const Outcome out = table->second->evaluate(v, a, &cx.c[v], static_cast<Natural>(x));
        if (!out.convergent || out.k != k)
          violate(v, {i}, "local value " + std::to_string(k) + " at " + std::to_string(x) + " disagrees with the functional");
      }
    } else {
      if (static_cast<Stage>(sigma.size()) != ev.stage) violate(ev.stage, {i}, "triple segment is not A restricted to s");
      for (Stage v = ev.stage; v <= cx.H; ++v) {
        if (v > ev.stage && cx.is_covered(v, r)) break;
        const Snapshot& a = cx.side_set(r.side, v);
        if (!in_cone(sigma, a)) violate(v, {i}, "preserved segment changed while the triple is live");
        const Outcome out = table->second->evaluate(v, a, nullptr, static_cast<Natural>(x));
        if (!out.convergent || out.k != k)
          violate(v, {i}, "local value " + std::to_string(k) + " at " + std::to_string(x) + " disagrees with the functional");
      }
    }
  }
}

// V10: decoding X from the change set of the run's p-approximation.
void check_omega_ce(const Context& cx) {
  if (!cx.robinson) throw Skip{"no guessing sets in the Sacks construction"};
  for (const auto& ev : cx.trace)
    if (ev.kind == event_kind::kFlag) throw Skip{"run is flagged " + ev.get("flag")};
  const PReplay p(cx);
  const int n = p.issued().empty() ? 0 : *p.issued().rbegin() + 1;
  std::vector<std::vector<std::uint8_t>> rows(n, std::vector<std::uint8_t>(cx.H + 1, 0));
  std::vector<int> bounds(n, 1);
  for (int j = 0; j < n; ++j) {
    for (Stage t = 0; t <= cx.H; ++t) rows[j][t] = static_cast<std::uint8_t>(p.p(j, t));
    bounds[j] = p.q(j) + 1;
    if (p.changes(j) >= bounds[j]) throw Skip{"p-contract violated"};
  }
  const ApproxTable tab(cx.H, rows, bounds);
  const ChangeSet changes = build_change_set(tab);
  for (int m = 0; m <= n; ++m) {
    std::vector<Natural> truth;
    for (int j = 0; j < m; ++j)
      if (p.truth(j, cx.H)) truth.push_back(j);
    if (restrict_to(tab, changes, m) != truth)
      violate(cx.H, {}, "decoded X differs from the guessing-set truth below " + std::to_string(m));
  }
}

// V11: one update per stage, driven by the strongest initialized block and
// its replayed tail; the final table matches the run's.
void check_updates(const Context& cx) {
  AssignmentReplay replay(cx.width);
  for (Stage s = 0; s <= cx.H; ++s) {
    std::optional<BlockId> strongest;
    std::vector<std::size_t> updates;
    for (std::size_t idx : cx.at[s]) {
      const TraceEvent& ev = cx.trace[idx];
      if (ev.kind == event_kind::kInitialize) {
        const BlockId blk = parse_block(ev);
        if (!strongest || priority_order(blk) < priority_order(*strongest)) strongest = blk;
      } else if (ev.kind == event_kind::kAssignmentUpdate) {
        updates.push_back(idx);
      }
    }
    if (updates.size() != 1) violate(s, updates, "expected exactly one assignment update");
    const TraceEvent& ev = cx.trace[updates.front()];
    if (!strongest) {
      if (ev.get("block") != "none") violate(s, updates, "assignment update without an initialization");
      continue;
    }
    if (ev.get("block") != block_label(*strongest))
      violate(s, updates, "update driven by " + ev.get("block") + " instead of " + block_label(*strongest));
    const Side side = requirement_side_for(strongest->side);
    const int tail = replay.tail(side, strongest->index);
    if (tail < 0 || tail > s) violate(s, updates, "initialized block has no tail at or below the stage");
    if (ev.get_int("tail") != tail)
      violate(s, updates, "tail " + ev.get("tail") + " differs from the replayed " + std::to_string(tail));
    replay.apply(side, strongest->index, tail, s);
  }
  if (cx.final && (cx.final->lambda.size() == static_cast<std::size_t>(cx.width))) {
    for (int e = 0; e < cx.width; ++e) {
      if (cx.final->lambda[e] != replay.get(Side::P, e) || cx.final->mu[e] != replay.get(Side::Q, e))
        violate(cx.H, {}, "final assignment differs from the replay at index " + std::to_string(e));
    }
  }
}

Json diagnostics(const Context& cx) {
  Json out = Json::object();
  Json blocks = Json::object();
  std::map<std::string, int> actions;
  int injuries = 0;
  for (const auto& ev : cx.trace) {
    if (ev.kind == event_kind::kRestraintSet) {
      Json& b = blocks[ev.get("block")];
      if (b.is_null()) b = Json::object();
      b["max_restraint"] = std::max(b.value("max_restraint", -1), static_cast<int>(ev.get_int("value")));
    } else if (ev.kind == event_kind::kInitialize) {
      Json& b = blocks[ev.get("block")];
      if (b.is_null()) b = Json::object();
      b["initializations"] = b.value("initializations", 0) + 1;
      b["last_initialized"] = ev.stage;
    } else if (ev.kind == event_kind::kAct) {
      ++actions[ev.get("req")];
    } else if (ev.kind == event_kind::kInjury) {
      ++injuries;
    }
  }
  out["blocks"] = std::move(blocks);
  out["assignment_final"] = {{"lambda", cx.lambda_final}, {"mu", cx.mu_final}};
  out["actions"] = actions;
  out["injuries"] = injuries;
  out["events"] = cx.trace.size();
  return out;
}

}  // namespace

std::string_view status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "?";
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& c : kChecks) out.emplace_back(c.id);
    return out;
  }();
  return ids;
}

bool VerificationReport::passed() const {
  if (flags.count("aborted")) return false;
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

const CheckResult& VerificationReport::check(std::string_view id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw std::out_of_range("no check " + std::string(id));
}

Json VerificationReport::to_json() const {
  Json out;
  Json cs = Json::array();
  for (const auto& c : checks) {
    Json j = {{"id", c.id}, {"name", c.name}, {"status", std::string(status_name(c.status))}};
    if (!c.message.empty()) j["message"] = c.message;
    if (c.status == CheckStatus::Fail) {
      Json w = Json::object();
      if (c.witness_stage) w["stage"] = *c.witness_stage;
      w["events"] = c.witness_events;
      j["witness"] = std::move(w);
    }
    cs.push_back(std::move(j));
  }
  out["checks"] = std::move(cs);
  out["flags"] = flags;
  out["diagnostics"] = diagnostics;
  return out;
}

VerificationReport verify(const Scenario& sc, const Trace& trace, const FinalState* final) {
  VerificationReport report;
  std::optional<Context> cx;
  std::string setup_error;
  try {
    cx.emplace(sc, trace, final);
  } catch (const std::exception& err) {
    setup_error = err.what();
  }

  using CheckFn = void (*)(const Context&);
  const CheckFn fns[] = {check_partition,     check_monotonicity, check_assignment_monotonicity,
                         check_restraint_integrity, check_diagonalization, check_injury,
                         check_certification, check_p_contract,   check_coherence,
                         check_omega_ce,      check_updates};
  for (std::size_t n = 0; n < std::size(kChecks); ++n) {
    CheckResult res;
    res.id = kChecks[n].id;
    res.name = kChecks[n].name;
    if (!cx) {
      res.status = CheckStatus::Fail;
      res.message = "trace cannot be replayed: " + setup_error;
      report.checks.push_back(std::move(res));
      continue;
    }
    try {
      fns[n](*cx);
    } catch (const Violation& v) {
      res.status = CheckStatus::Fail;
      res.message = v.message;
      res.witness_stage = v.stage;
      res.witness_events = v.events;
    } catch (const Skip& s) {
      res.status = CheckStatus::Skipped;
      res.message = s.reason;
    } catch (const std::exception& err) {
      res.status = CheckStatus::Fail;
      res.message = std::string("malformed trace: ") + err.what();
    }
    report.checks.push_back(std::move(res));
  }

  bool unsettled = false;
  for (const auto& ev : trace) {
    if (ev.kind != event_kind::kFlag) continue;
    const auto flag = ev.find("flag").value_or("");
    if (flag == "unsettled") unsettled = true;
    if (flag == "p-contract-violated") report.flags.insert(flag);
  }
  report.flags.insert(unsettled ? "unsettled" : "settled");
  if (final && final->failure) report.flags.insert("aborted");
  if (cx) {
    try {
      report.diagnostics = diagnostics(*cx);
    } catch (const std::exception& err) {
      report.diagnostics = {{"error", err.what()}};
    }
  }
  if (final && final->failure)
    report.diagnostics["failure"] = {{"stage", final->failure->stage}, {"what", final->failure->what}};
  return report;
}

}  // namespace splitsim

#include "splitsim/corrupt.hpp"

#include <algorithm>
#include <set>

namespace splitsim {

namespace {

using Iter = Trace::iterator;

Iter find_kind(Trace& trace, std::string_view kind) {
  return std::find_if(trace.begin(), trace.end(), [&](const TraceEvent& ev) { return ev.kind == kind; });
}

Iter last_of_kind(Trace& trace, std::string_view kind) {
  auto rit = std::find_if(trace.rbegin(), trace.rend(), [&](const TraceEvent& ev) { return ev.kind == kind; });
  return rit == trace.rend() ? trace.end() : std::prev(rit.base());
}

/// Inserts `ev` after the last event of its stage.
void insert_at_stage(Trace& trace, TraceEvent ev) {
  auto pos = std::find_if(trace.begin(), trace.end(), [&](const TraceEvent& e) { return e.stage > ev.stage; });
  trace.insert(pos, std::move(ev));
}

void require_robinson(const Scenario& sc, std::string_view id) {
  if (sc.construction != ConstructionKind::Robinson)
    throw CorruptionInapplicable(std::string(id) + " corruption needs a Robinson scenario");
}

}  // namespace

Trace corrupt_trace(const Scenario& sc, Trace trace, std::string_view id) {
  const int H = sc.horizon;
  if (id == "V1") {
    // Route an element that B never enumerated.
    std::set<int> b;
    for (const auto& a : sc.b) b.insert(a.element);
    int x = 0;
    while (x < H && b.count(x)) ++x;
    if (x >= H) throw CorruptionInapplicable("B exhausts every element below the horizon");
    insert_at_stage(trace, TraceEvent(1, event_kind::kRoute).set("element", x).set("target", "A0"));
  } else if (id == "V2") {
    auto it = find_kind(trace, event_kind::kEnumerate);
    if (it == trace.end()) throw CorruptionInapplicable("no enumerate events to duplicate");
    TraceEvent dup = *it;
    dup.stage = H;
    insert_at_stage(trace, std::move(dup));
  } else if (id == "V3") {
    auto it = last_of_kind(trace, event_kind::kAssignmentUpdate);
    if (it == trace.end()) throw CorruptionInapplicable("no assignment updates");
    *it = TraceEvent(it->stage, event_kind::kAssignmentUpdate).set("block", "L:" + std::to_string(H + 5)).set("tail", 0);
  } else if (id == "V4") {
    auto it = find_kind(trace, event_kind::kRoute);
    if (it == trace.end()) throw CorruptionInapplicable("no route events to misdirect");
    it->set("target", it->get("target") == "A0" ? "A1" : "A0");
  } else if (id == "V5") {
    auto it = find_kind(trace, event_kind::kDiagonalize);
    if (it == trace.end()) throw CorruptionInapplicable("no diagonalize events");
    it->set("k", 1 - it->get_int("k"));
  } else if (id == "V6") {
    require_robinson(sc, id);
    if (sc.functionals.empty()) throw CorruptionInapplicable("no requirements to injure");
    std::set<Stage> initialized;
    for (const auto& ev : trace)
      if (ev.kind == event_kind::kInitialize) initialized.insert(ev.stage);
    Stage s = 0;
    while (s <= H && initialized.count(s)) ++s;
    if (s > H) throw CorruptionInapplicable("every stage has an initialization");
    const auto& r = sc.functionals.front().id();
    insert_at_stage(trace, TraceEvent(s, event_kind::kInjury)
                               .set("certified", 0)
                               .set("j", 0)
                               .set("k", 0)
                               .set("req", requirement_label(r))
                               .set("sigma", "")
                               .set("theta", "1")
                               .set("x", 0));
  } else if (id == "V7") {
    require_robinson(sc, id);
    if (sc.functionals.empty()) throw CorruptionInapplicable("no requirements to certify");
    // A refusal of the empty segment, which C can never leave.
    auto it = std::find_if(trace.begin(), trace.end(), [](const TraceEvent& ev) {
      return ev.kind == event_kind::kCertify || ev.kind == event_kind::kRefuseCertify;
    });
    if (it == trace.end()) throw CorruptionInapplicable("no certification events");
    it->kind = std::string(event_kind::kRefuseCertify);
    it->set("cached", 1).set("outcome", "refused").set("resolved", it->stage).set("sigma", "").set("wj", 0);
  } else if (id == "V8") {
    require_robinson(sc, id);
    insert_at_stage(trace, TraceEvent(H, event_kind::kFlag)
                               .set("changes", 0)
                               .set("flag", "p-contract-violated")
                               .set("j", 0)
                               .set("q", 0));
  } else if (id == "V9") {
    auto it = find_kind(trace, event_kind::kDefineLocal);
    if (it == trace.end()) throw CorruptionInapplicable("no define-local events");
    it->set("k", 1 - it->get_int("k"));
  } else if (id == "V10") {
    require_robinson(sc, id);
    if (sc.p_policy.kind == PPolicy::kTruthfulDelay && sc.p_policy.delay == 0)
      throw CorruptionInapplicable("with delay 0, p(j, H) always equals the truth");
    if (sc.functionals.empty()) throw CorruptionInapplicable("no requirements");
    // A fresh guessing set entered at the last stage; p has not caught up.
    int j = 0;
    for (const auto& ev : trace)
      if (ev.kind == event_kind::kCertify || ev.kind == event_kind::kRefuseCertify)
        j = std::max(j, static_cast<int>(ev.get_int("j")) + 1);
    if (sc.p_policy.kind == PPolicy::kTable && sc.p_policy.toggles.count(j))
      throw CorruptionInapplicable("the table already defines p for the fresh index");
    trace.erase(std::remove_if(trace.begin(), trace.end(), [](const TraceEvent& ev) { return ev.kind == event_kind::kFlag; }),
                trace.end());
    insert_at_stage(trace, TraceEvent(H, event_kind::kRefuseCertify)
                               .set("cached", 0)
                               .set("j", j)
                               .set("k", 0)
                               .set("outcome", "pending")
                               .set("req", requirement_label(sc.functionals.front().id()))
                               .set("resolved", -1)
                               .set("sigma", "")
                               .set("theta", "")
                               .set("wj", 1)
                               .set("x", 0));
  } else if (id == "V11") {
    auto it = last_of_kind(trace, event_kind::kAssignmentUpdate);
    if (it == trace.end()) throw CorruptionInapplicable("no assignment updates");
    if (it->get("block") == "none")
      it->set("block", "L:0").set("tail", 0);
    else
      it->set("tail", it->get_int("tail") + 1);
  } else {
    throw std::invalid_argument("unknown check id '" + std::string(id) + "'");
  }
  return trace;
}

}  // namespace splitsim

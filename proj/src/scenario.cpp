#include "splitsim/scenario.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "splitsim/sacks.hpp"

namespace splitsim {

namespace {

constexpr int kMaxHorizon = 1 << 16;

std::string join_issues(const std::vector<ValidationIssue>& issues) {
  std::string out = "invalid scenario:";
  for (const auto& i : issues) out += "\n  " + i.path + ": " + i.message;
  return out;
}

class Checker {
 public:
  void fail(const std::string& path, const std::string& message) { issues_.push_back({path, message}); }
  bool ok() const { return issues_.empty(); }
  std::vector<ValidationIssue> take() { return std::move(issues_); }

  bool expect_object(const Json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(path + "." + key, "unknown key");
    }
    return true;
  }

  std::optional<long long> integer(const Json& j, const std::string& path, long long lo, long long hi) {
    if (!j.is_number_integer()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    const long long v = j.is_number_unsigned() && j.get<unsigned long long>() > static_cast<unsigned long long>(hi)
                            ? hi + 1
                            : j.get<long long>();
    if (v < lo || v > hi) {
      fail(path, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return v;
  }

  std::optional<BitString> bits(const Json& j, const std::string& path) {
    if (!j.is_string()) {
      fail(path, "expected a string of 0/1");
      return std::nullopt;
    }
    try {
      return BitString::parse(j.get<std::string>());
    } catch (const std::invalid_argument&) {
      fail(path, "expected a string of 0/1");
      return std::nullopt;
    }
  }

 private:
  std::vector<ValidationIssue> issues_;
};

std::vector<ArrivalSpec> parse_pairs(Checker& ck, const Json& j, const std::string& path, int horizon) {
  std::vector<ArrivalSpec> out;
  if (!j.is_array()) {
    ck.fail(path, "expected an array of [stage, element]");
    return out;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) {
      ck.fail(p, "expected [stage, element]");
      continue;
    }
    auto s = ck.integer(j[i][0], p + "[0]", 0, horizon);
    auto x = ck.integer(j[i][1], p + "[1]", 0, horizon - 1);
    if (s && x) out.push_back({static_cast<Stage>(*s), static_cast<int>(*x)});
  }
  return out;
}

void check_unique_elements(Checker& ck, const std::vector<ArrivalSpec>& arrivals, const std::string& path) {
  std::set<int> seen;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    if (!seen.insert(arrivals[i].element).second)
      ck.fail(path + "[" + std::to_string(i) + "]", "element " + std::to_string(arrivals[i].element) +
                                                       " is enumerated more than once");
  }
}

const Json& object_or_empty(const Json& j) {
  static const Json empty = Json::object();
  return j.is_object() ? j : empty;
}

/// Decimal object key as a guessing-set index, or -1.
int index_key(const std::string& key) {
  if (key.empty() || key.size() > 9 || !std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return -1;
  return std::stoi(key);
}

Json pairs_to_json(const std::vector<ArrivalSpec>& arrivals) {
  Json out = Json::array();
  for (const auto& a : arrivals) out.push_back(Json::array({a.stage, a.element}));
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::string_view construction_name(ConstructionKind k) {
  return k == ConstructionKind::Sacks ? "sacks" : "robinson";
}

std::vector<ArrivalSpec> expand_churn(const ChurnPolicy& policy, int horizon, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x636875726e2d43ULL);
  const int below = std::min(policy.below, horizon);
  std::vector<int> pool(below);
  for (int i = 0; i < below; ++i) pool[i] = i;
  for (int i = below - 1; i > 0; --i) std::swap(pool[i], pool[rng() % static_cast<std::uint64_t>(i + 1)]);
  const int n = std::min(policy.count, below);
  std::vector<ArrivalSpec> out;
  for (int i = 0; i < n; ++i) out.push_back({static_cast<Stage>(rng() % (horizon + 1)), pool[i]});
  std::sort(out.begin(), out.end());
  return out;
}

Scenario load_scenario(const Json& doc) {
  Checker ck;
  Scenario sc;
  if (!ck.expect_object(doc, "$", {"horizon", "construction", "b", "c", "d", "functionals", "p_policy",
                                   "q_default", "q_overrides", "seed"}))
    throw ValidationError(ck.take());

  if (!doc.contains("horizon")) {
    ck.fail("$.horizon", "required");
    throw ValidationError(ck.take());
  }
  auto h = ck.integer(doc["horizon"], "$.horizon", 2, kMaxHorizon);
  if (!h) throw ValidationError(ck.take());
  sc.horizon = static_cast<int>(*h);
  const int H = sc.horizon;

  if (!doc.contains("construction")) {
    ck.fail("$.construction", "required");
  } else if (doc["construction"] == "sacks") {
    sc.construction = ConstructionKind::Sacks;
  } else if (doc["construction"] == "robinson") {
    sc.construction = ConstructionKind::Robinson;
  } else {
    ck.fail("$.construction", "must be \"sacks\" or \"robinson\"");
  }

  if (doc.contains("seed")) {
    const Json& seed = doc["seed"];
    if (seed.is_number_unsigned())
      sc.seed = seed.get<std::uint64_t>();
    else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0)
      sc.seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
    else
      ck.fail("$.seed", "expected a nonnegative integer");
  }

  if (doc.contains("b")) {
    sc.b = parse_pairs(ck, doc["b"], "$.b", H);
    std::set<Stage> stages;
    for (std::size_t i = 0; i < sc.b.size(); ++i) {
      const std::string p = "$.b[" + std::to_string(i) + "]";
      if (sc.b[i].stage % 2 == 0) ck.fail(p, "B arrivals must be at odd stages");
      if (!stages.insert(sc.b[i].stage).second) ck.fail(p, "at most one B arrival per stage");
    }
    check_unique_elements(ck, sc.b, "$.b");
  }

  if (doc.contains("c")) {
    const Json& c = doc["c"];
    if (c.is_object()) {
      if (ck.expect_object(c, "$.c", {"policy", "params"})) {
        if (c.value("policy", Json()) != "churn-C") ck.fail("$.c.policy", "the only C policy is \"churn-C\"");
        ChurnPolicy policy;
        if (c.contains("params") && ck.expect_object(c["params"], "$.c.params", {"count", "below"})) {
          const Json& params = c["params"];
          if (params.contains("count"))
            if (auto v = ck.integer(params["count"], "$.c.params.count", 0, H)) policy.count = static_cast<int>(*v);
          if (params.contains("below"))
            if (auto v = ck.integer(params["below"], "$.c.params.below", 1, H)) policy.below = static_cast<int>(*v);
        }
        sc.c_policy = policy;
        sc.c = expand_churn(policy, H, sc.seed);
      }
    } else {
      sc.c = parse_pairs(ck, c, "$.c", H);
      check_unique_elements(ck, sc.c, "$.c");
    }
  }

  if (doc.contains("d")) {
    const Json& d = doc["d"];
    if (d.is_object()) {
      if (ck.expect_object(d, "$.d", {"policy", "params"})) {
        const Json policy = d.value("policy", Json());
        const Json params = d.value("params", Json::object());
        if (policy == "static") {
          if (ck.expect_object(params, "$.d.params", {"schedule"})) {
            sc.d = parse_pairs(ck, params.value("schedule", Json::array()), "$.d.params.schedule", H);
            check_unique_elements(ck, sc.d, "$.d.params.schedule");
          }
        } else if (policy == "anti-delta") {
          AntiDeltaPolicy ad;
          if (ck.expect_object(params, "$.d.params", {"limit"}) && params.contains("limit"))
            if (auto v = ck.integer(params["limit"], "$.d.params.limit", 0, H)) ad.limit = static_cast<int>(*v);
          sc.d_policy = ad;
        } else {
          ck.fail("$.d.policy", "must be \"static\" or \"anti-delta\"");
        }
      }
    } else {
      sc.d = parse_pairs(ck, d, "$.d", H);
      check_unique_elements(ck, sc.d, "$.d");
    }
  }

  if (doc.contains("functionals")) {
    const Json& fs = doc["functionals"];
    if (!fs.is_array()) ck.fail("$.functionals", "expected an array");
    std::set<FunctionalId> ids;
    for (std::size_t fi = 0; fs.is_array() && fi < fs.size(); ++fi) {
      const std::string fp = "$.functionals[" + std::to_string(fi) + "]";
      const Json& f = fs[fi];
      if (!ck.expect_object(f, fp, {"side", "e", "axioms"})) continue;
      auto side = f.contains("side") ? ck.integer(f["side"], fp + ".side", 0, 1) : (ck.fail(fp + ".side", "required"), std::nullopt);
      auto e = f.contains("e") ? ck.integer(f["e"], fp + ".e", 0, H) : (ck.fail(fp + ".e", "required"), std::nullopt);
      if (!side || !e) continue;
      const FunctionalId id{*side == 0 ? Side::P : Side::Q, static_cast<int>(*e)};
      if (!ids.insert(id).second) ck.fail(fp, "duplicate functional for this side and index");

      std::vector<StagedAxiom> axioms;
      const Json axs = f.value("axioms", Json::array());
      if (!axs.is_array()) ck.fail(fp + ".axioms", "expected an array");
      for (std::size_t ai = 0; axs.is_array() && ai < axs.size(); ++ai) {
        const std::string ap = fp + ".axioms[" + std::to_string(ai) + "]";
        const Json& a = axs[ai];
        if (!ck.expect_object(a, ap, {"theta", "sigma", "x", "k", "stage"})) continue;
        bool good = true;
        StagedAxiom staged;
        for (const char* key : {"theta", "x", "k", "stage"}) {
          if (!a.contains(key)) {
            ck.fail(ap + "." + key, "required");
            good = false;
          }
        }
        if (!good) continue;
        auto theta = ck.bits(a["theta"], ap + ".theta");
        auto x = ck.integer(a["x"], ap + ".x", 0, H - 1);
        auto k = ck.integer(a["k"], ap + ".k", 0, 1);
        auto stage = ck.integer(a["stage"], ap + ".stage", 0, H);
        std::optional<BitString> sigma;
        if (a.contains("sigma")) {
          sigma = ck.bits(a["sigma"], ap + ".sigma");
          if (sc.construction == ConstructionKind::Sacks) ck.fail(ap + ".sigma", "Sacks functionals take no C-oracle");
        } else if (sc.construction == ConstructionKind::Robinson) {
          ck.fail(ap + ".sigma", "Robinson functionals need a C-oracle string");
        }
        if (!theta || !x || !k || !stage || (a.contains("sigma") && !sigma)) continue;
        if (static_cast<long long>(theta->size()) > *stage)
          ck.fail(ap + ".theta", "use exceeds the stage at which the axiom appears");
        if (sigma && static_cast<long long>(sigma->size()) > *stage)
          ck.fail(ap + ".sigma", "use exceeds the stage at which the axiom appears");
        staged.appear = static_cast<Stage>(*stage);
        staged.axiom = Axiom{*theta, sigma, static_cast<Natural>(*x), static_cast<int>(*k)};
        axioms.push_back(std::move(staged));
      }
      FunctionalTable table(id, std::move(axioms));
      for (const auto& conflict : validate_consistency(table))
        ck.fail(fp + ".axioms[" + std::to_string(conflict.second) + "]",
                "conflicts with axioms[" + std::to_string(conflict.first) + "]");
      sc.functionals.push_back(std::move(table));
    }
  }

  if (doc.contains("p_policy")) {
    const Json& pp = doc["p_policy"];
    if (pp.is_object() && pp.value("type", Json()) == "truthful_delay") {
      if (ck.expect_object(pp, "$.p_policy", {"type", "d"})) {
        sc.p_policy.kind = PPolicy::kTruthfulDelay;
        if (pp.contains("d"))
          if (auto v = ck.integer(pp["d"], "$.p_policy.d", 0, H)) sc.p_policy.delay = static_cast<int>(*v);
      }
    } else if (pp.is_object() && pp.value("type", Json()) == "table") {
      if (ck.expect_object(pp, "$.p_policy", {"type", "values"})) {
        sc.p_policy.kind = PPolicy::kTable;
        const Json values = pp.value("values", Json::object());
        if (!values.is_object()) ck.fail("$.p_policy.values", "expected an object keyed by guessing-set index");
        for (const auto& [key, list] : object_or_empty(values).items()) {
          const std::string vp = "$.p_policy.values." + key;
          const int j = index_key(key);
          if (j < 0) {
            ck.fail(vp, "keys must be nonnegative integers");
            continue;
          }
          if (!list.is_array()) {
            ck.fail(vp, "expected an array of toggle stages");
            continue;
          }
          std::vector<Stage> toggles;
          for (std::size_t i = 0; i < list.size(); ++i)
            if (auto v = ck.integer(list[i], vp + "[" + std::to_string(i) + "]", 1, H))
              toggles.push_back(static_cast<Stage>(*v));
          std::set<Stage> distinct(toggles.begin(), toggles.end());
          if (distinct.size() != toggles.size()) ck.fail(vp, "toggle stages must be distinct");
          sc.p_policy.toggles[j] = std::move(toggles);
        }
      }
    } else {
      ck.fail("$.p_policy", "expected {\"type\": \"truthful_delay\", \"d\": n} or {\"type\": \"table\", ...}");
    }
  }

  sc.q_default = 2 * static_cast<int>(sc.c.size()) + 2;
  if (doc.contains("q_default"))
    if (auto v = ck.integer(doc["q_default"], "$.q_default", 1, 1LL << 30)) sc.q_default = static_cast<int>(*v);
  if (doc.contains("q_overrides")) {
    const Json& qo = doc["q_overrides"];
    if (!qo.is_object()) ck.fail("$.q_overrides", "expected an object keyed by guessing-set index");
    for (const auto& [key, value] : object_or_empty(qo).items()) {
      const std::string qp = "$.q_overrides." + key;
      const int j = index_key(key);
      if (j < 0) {
        ck.fail(qp, "keys must be nonnegative integers");
        continue;
      }
      if (auto v = ck.integer(value, qp, 1, 1LL << 30)) sc.q_overrides[j] = static_cast<int>(*v);
    }
  }

  if (!ck.ok()) throw ValidationError(ck.take());
  return sc;
}

Scenario load_scenario_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& err) {
    throw ValidationError({{"$", std::string("not valid JSON: ") + err.what()}});
  }
  return load_scenario(doc);
}

Json scenario_to_json(const Scenario& sc) {
  Json doc;
  doc["horizon"] = sc.horizon;
  doc["construction"] = std::string(construction_name(sc.construction));
  doc["b"] = pairs_to_json(sc.b);
  doc["c"] = pairs_to_json(sc.c);
  if (sc.d_policy) {
    Json params = Json::object();
    if (sc.d_policy->limit >= 0) params["limit"] = sc.d_policy->limit;
    if (sc.d.empty()) {
      doc["d"] = {{"policy", "anti-delta"}, {"params", params}};
    } else {
      throw std::logic_error("a scenario cannot combine a static D schedule with a reactive policy");
    }
  } else {
    doc["d"] = pairs_to_json(sc.d);
  }
  Json fs = Json::array();
  for (const auto& t : sc.functionals) {
    Json axs = Json::array();
    for (const auto& staged : t.axioms()) {
      Json a;
      a["theta"] = staged.axiom.theta.str();
      if (staged.axiom.sigma) a["sigma"] = staged.axiom.sigma->str();
      a["x"] = staged.axiom.x;
      a["k"] = staged.axiom.k;
      a["stage"] = staged.appear;
      axs.push_back(std::move(a));
    }
    fs.push_back({{"side", t.id().side == Side::P ? 0 : 1}, {"e", t.id().e}, {"axioms", std::move(axs)}});
  }
  doc["functionals"] = std::move(fs);
  if (sc.p_policy.kind == PPolicy::kTruthfulDelay) {
    doc["p_policy"] = {{"type", "truthful_delay"}, {"d", sc.p_policy.delay}};
  } else {
    Json values = Json::object();
    for (const auto& [j, toggles] : sc.p_policy.toggles) values[std::to_string(j)] = toggles;
    doc["p_policy"] = {{"type", "table"}, {"values", std::move(values)}};
  }
  doc["q_default"] = sc.q_default;
  if (!sc.q_overrides.empty()) {
    Json qo = Json::object();
    for (const auto& [j, q] : sc.q_overrides) qo[std::to_string(j)] = q;
    doc["q_overrides"] = std::move(qo);
  }
  doc["seed"] = sc.seed;
  return doc;
}

namespace {

/// The anti-delta adversary. It reads only published define-local events.
class AntiDelta {
 public:
  explicit AntiDelta(AntiDeltaPolicy policy) : policy_(policy) {}

  std::optional<int> next(const Trace& trace, const Snapshot& d_now, Stage s) {
    for (; seen_ < trace.size(); ++seen_) {
      const TraceEvent& ev = trace[seen_];
      if (ev.kind == event_kind::kDefineLocal && ev.get_int("k") == 0)
        candidates_.insert(static_cast<int>(ev.get_int("x")));
    }
    if (s % 2 == 0 || (policy_.limit >= 0 && used_ >= policy_.limit)) return std::nullopt;
    for (int x : candidates_) {
      if (!d_now.contains(x)) {
        ++used_;
        return x;
      }
    }
    return std::nullopt;
  }

 private:
  AntiDeltaPolicy policy_;
  std::size_t seen_ = 0;
  std::set<int> candidates_;
  int used_ = 0;
};

std::map<Stage, std::vector<int>> by_stage(const std::vector<ArrivalSpec>& arrivals) {
  std::map<Stage, std::vector<int>> out;
  for (const auto& a : arrivals) out[a.stage].push_back(a.element);
  return out;
}

std::unique_ptr<Strategy> make_strategy(const Scenario& sc) {
  if (sc.construction == ConstructionKind::Sacks) return std::make_unique<SacksStrategy>(sc.functionals);
  EnumerationSchedule c(Role::C);
  for (const auto& a : sc.c) c.add(a.stage, static_cast<Natural>(a.element));
  return std::make_unique<RobinsonStrategy>(sc.functionals, std::move(c), sc.p_policy, sc.q_default, sc.q_overrides,
                                            sc.horizon);
}

}  // namespace

RunResult run(const Scenario& sc) {
  Construction construction(Horizon(sc.horizon), make_strategy(sc));
  const auto b = by_stage(sc.b);
  const auto c = by_stage(sc.c);
  const auto d = by_stage(sc.d);
  std::optional<AntiDelta> adversary;
  if (sc.d_policy) adversary.emplace(*sc.d_policy);

  RunResult result;
  try {
    for (Stage s = 0; s <= sc.horizon; ++s) {
      Arrivals arrivals;
      if (auto it = b.find(s); it != b.end()) arrivals.b = it->second.front();
      if (sc.construction == ConstructionKind::Robinson)
        if (auto it = c.find(s); it != c.end()) arrivals.c = it->second;
      if (auto it = d.find(s); it != d.end()) arrivals.d = it->second;
      if (adversary) {
        const World& w = construction.world();
        if (auto x = adversary->next(construction.trace(), w.d_now, s)) {
          if (std::find(arrivals.d.begin(), arrivals.d.end(), *x) == arrivals.d.end()) arrivals.d.push_back(*x);
        }
      }
      construction.run_stage(s, arrivals);
    }
    construction.finish();
  } catch (const InvariantViolation& err) {
    result.final.failure = InvariantFailure{err.stage(), err.what()};
  }

  result.trace = construction.trace();
  FinalState& f = result.final;
  f.horizon = sc.horizon;
  const auto& assignment = construction.assignment();
  for (int e = 0; e <= sc.horizon + 1; ++e) {
    f.lambda.push_back(assignment.block_of(Side::P, e));
    f.mu.push_back(assignment.block_of(Side::Q, e));
  }
  const World& w = construction.world();
  f.a0 = w.a0_now.members();
  f.a1 = w.a1_now.members();
  f.b = w.b_now.members();
  f.c = w.c_now.members();
  f.d = w.d_now.members();
  f.blocks = construction.blocks();
  return result;
}

}  // namespace splitsim

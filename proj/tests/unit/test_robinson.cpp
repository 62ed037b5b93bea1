#include <gtest/gtest.h>

#include <random>
#include <set>

#include "splitsim/robinson.hpp"
#include "splitsim/scenario.hpp"

namespace splitsim {
namespace {

BitString bits(std::string_view s) { return BitString::parse(s); }
Axiom axiom(std::string_view theta, std::string_view sigma, Natural x = 0, int k = 0) {
  return Axiom{bits(theta), bits(sigma), x, k};
}
PPolicy delay(int d) { return PPolicy{PPolicy::kTruthfulDelay, d, {}}; }

TEST(Certify, CertifiedAfterDelay) {
  EnumerationSchedule c(Role::C);
  GuessingRegistry reg(delay(2), 2, {}, &c, 20);
  const int j = reg.allocate({{Side::P, 0}, 0, 0});
  const auto rec = reg.certify(j, axiom("", "0"), 4);
  EXPECT_EQ(rec.resolution, CertificationRecord::kCertified);
  EXPECT_EQ(rec.resolved_at, 6);
  EXPECT_TRUE(rec.enumerated_sigma);
}

TEST(Certify, RefusedWhenConeLeftFirst) {
  EnumerationSchedule c(Role::C);
  c.add(5, 0);
  GuessingRegistry reg(delay(2), 4, {}, &c, 20);
  const int j = reg.allocate({{Side::P, 0}, 0, 0});
  const auto rec = reg.certify(j, axiom("", "0"), 4);
  EXPECT_EQ(rec.resolution, CertificationRecord::kRefused);
  EXPECT_EQ(rec.resolved_at, 5);
}

TEST(Certify, CoveredSigmaIsNotReenumerated) {
  EnumerationSchedule c(Role::C);
  GuessingRegistry reg(delay(0), 4, {}, &c, 20);
  const int j = reg.allocate({{Side::P, 0}, 0, 0});
  ASSERT_EQ(reg.certify(j, axiom("", ""), 2).resolution, CertificationRecord::kCertified);
  const auto rec = reg.certify(j, axiom("", "00"), 4);
  EXPECT_FALSE(rec.enumerated_sigma);
  EXPECT_EQ(reg.entries(j).size(), 1u);
  EXPECT_EQ(rec.resolution, CertificationRecord::kCertified);
  EXPECT_EQ(rec.resolved_at, 4);
}

TEST(Certify, PendingWhenHorizonEnds) {
  EnumerationSchedule c(Role::C);
  GuessingRegistry reg(delay(3), 4, {}, &c, 6);
  const int j = reg.allocate({{Side::P, 0}, 0, 0});
  EXPECT_EQ(reg.certify(j, axiom("", "0"), 4).resolution, CertificationRecord::kPending);
}

TEST(Certify, TablePolicy) {
  EnumerationSchedule c(Role::C);
  PPolicy policy{PPolicy::kTable, 0, {{0, {7}}}};
  GuessingRegistry reg(policy, 4, {}, &c, 20);
  const int j = reg.allocate({{Side::P, 0}, 0, 0});
  EXPECT_EQ(reg.p(j, 6), 0);
  EXPECT_EQ(reg.p(j, 7), 1);
  const auto rec = reg.certify(j, axiom("", "0"), 2);
  EXPECT_EQ(rec.resolution, CertificationRecord::kCertified);
  EXPECT_EQ(rec.resolved_at, 7);
}

TEST(TruthX, Examples) {
  EnumerationSchedule c(Role::C);
  c.add(3, 0);
  c.add(6, 1);
  GuessingRegistry reg(delay(0), 8, {}, &c, 20);
  const int j = reg.allocate({{Side::P, 0}, 0, 0});
  EXPECT_EQ(reg.truth_x(j, 10), 0);
  reg.enumerate(j, bits("1"), 4);
  EXPECT_EQ(reg.truth_x(j, 4), 1);
  EXPECT_EQ(reg.truth_x(j, 6), 1);
  const int j2 = reg.allocate({{Side::P, 0}, 1, 0});
  reg.enumerate(j2, bits("0"), 0);
  reg.enumerate(j2, bits("10"), 3);
  EXPECT_EQ(reg.truth_x(j2, 2), 1);
  EXPECT_EQ(reg.truth_x(j2, 6), 0);
}

// Oracle for the truthful-delay policy written from its definition, using
// per-stage snapshots rather than cone windows.
TEST(PApproximation, TruthfulDelayMatchesDefinitionAndContract) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int last = 10 + static_cast<int>(rng() % 40);
    EnumerationSchedule c(Role::C);
    for (Natural x = 0; x < 6; ++x)
      if (rng() % 2) c.add(static_cast<Stage>(rng() % (last + 1)), x);
    const int d = static_cast<int>(rng() % 4);
    const int q = 2 * static_cast<int>(c.size()) + 2;
    GuessingRegistry reg(delay(d), q, {}, &c, last);
    const int j = reg.allocate({{Side::P, 0}, 0, 0});
    std::vector<std::pair<BitString, Stage>> w;
    for (int n = 0, m = static_cast<int>(rng() % 5); n < m; ++n) {
      std::string t;
      for (std::size_t i = 0, len = rng() % 5; i < len; ++i) t += rng() % 3 == 0 ? '1' : '0';
      const Stage st = static_cast<Stage>(rng() % (last + 1));
      w.emplace_back(bits(t), st);
    }
    std::sort(w.begin(), w.end(), [](auto& a, auto& b) { return a.second < b.second; });
    for (auto& [sigma, st] : w) reg.enumerate(j, sigma, st);

    auto truth = [&](Stage t) {
      const Snapshot snap = c.snapshot(t);
      for (auto& [sigma, st] : w)
        if (st <= t && in_cone(sigma, snap)) return 1;
      return 0;
    };
    int changes = 0;
    for (Stage t = 0; t <= last; ++t) {
      const int expected = (t >= std::max(d, 1) && truth(t - d)) ? 1 : 0;
      ASSERT_EQ(reg.p(j, t), expected) << "trial " << trial << " t=" << t;
      ASSERT_EQ(reg.truth_x(j, t), truth(t));
      if (t > 0) changes += reg.p(j, t) != reg.p(j, t - 1);
    }
    ASSERT_EQ(reg.p(j, 0), 0);
    ASSERT_EQ(reg.mind_changes(j), changes);
    ASSERT_LE(changes, q);
  }
}

TEST(LocalOracle, Examples) {
  LocalFunctionalOracle loc;
  Snapshot c;
  EXPECT_FALSE(eval_local(loc, c, 0).convergent);
  loc.axioms[0].push_back(LocalAxiom{bits(""), bits("01"), 1, 2, true});
  c.insert(1);
  EXPECT_EQ(eval_local(loc, c, 0), Outcome::converge(1, 2));
  c.insert(0);
  loc.expire(c);
  EXPECT_FALSE(eval_local(loc, c, 0).convergent);
  EXPECT_FALSE(loc.axioms[0][0].live);
}

Json robinson_doc(int horizon, Json functionals, Json extra = Json::object()) {
  Json doc = {{"horizon", horizon},
              {"construction", "robinson"},
              {"b", Json::array()},
              {"c", Json::array()},
              {"d", Json::array()},
              {"p_policy", {{"type", "truthful_delay"}, {"d", 0}}},
              {"functionals", std::move(functionals)}};
  for (auto& [k, v] : extra.items()) doc[k] = v;
  return doc;
}

Json p_axioms(int e, Json axioms) { return Json::array({{{"side", 0}, {"e", e}, {"axioms", std::move(axioms)}}}); }
Json axj(std::string theta, std::string sigma, int x, int k, int stage) {
  return {{"theta", theta}, {"sigma", sigma}, {"x", x}, {"k", k}, {"stage", stage}};
}

std::vector<TraceEvent> of_kind(const Trace& t, std::string_view kind, Stage s = -1) {
  std::vector<TraceEvent> out;
  for (const auto& ev : t)
    if (ev.kind == kind && (s < 0 || ev.stage == s)) out.push_back(ev);
  return out;
}

TEST(RunPx, CertifiedComputationDefinesAndRestrains) {
  const auto res = run(load_scenario(robinson_doc(6, p_axioms(0, {axj("", "", 0, 0, 0), axj("", "", 1, 0, 0)}))));
  ASSERT_EQ(of_kind(res.trace, "certify", 2).size(), 2u);
  EXPECT_EQ(of_kind(res.trace, "define-local", 2).size(), 2u);
  const auto rs = of_kind(res.trace, "restraint-set", 2);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].get_int("value"), 2);
  // Stage 4 finds both inputs defined already and stops at x = 2.
  EXPECT_TRUE(of_kind(res.trace, "certify", 4).empty());
  EXPECT_TRUE(of_kind(res.trace, "act", 4).empty());
}

TEST(RunPx, DisagreementSkipsCertification) {
  Json doc = robinson_doc(6, p_axioms(0, {axj("", "", 0, 0, 0)}));
  doc["d"] = Json::array({Json::array({1, 0})});
  const auto res = run(load_scenario(doc));
  EXPECT_TRUE(of_kind(res.trace, "certify").empty());
  EXPECT_TRUE(of_kind(res.trace, "refuse-certify").empty());
}

TEST(RunPx, DefersUntilStageExceedsUse) {
  const auto res = run(load_scenario(robinson_doc(8, p_axioms(0, {axj("00", "", 0, 0, 2)}))));
  EXPECT_TRUE(of_kind(res.trace, "certify", 2).empty());
  EXPECT_EQ(of_kind(res.trace, "certify", 4).size(), 1u);
}

TEST(RunRequirement, TauAndEarlyStop) {
  Scenario sc = load_scenario(robinson_doc(8, p_axioms(0, {axj("", "", 0, 0, 0), axj("", "", 1, 0, 0)})));
  RobinsonStrategy* strat = nullptr;
  auto owned = std::make_unique<RobinsonStrategy>(sc.functionals, EnumerationSchedule(Role::C), sc.p_policy,
                                                  sc.q_default, sc.q_overrides, sc.horizon);
  strat = owned.get();
  Construction c(Horizon(sc.horizon), std::move(owned));
  c.run_stage(0, {});
  EXPECT_FALSE(strat->state({Side::P, 0}).tau);  // s = 0: nothing to scan
  c.run_stage(1, {});
  c.run_stage(2, {});
  EXPECT_FALSE(strat->state({Side::P, 0}).tau);
  const auto again = strat->run_requirement(c, {Side::P, 0}, 2);
  EXPECT_FALSE(again.acted);
  EXPECT_FALSE(again.tau);
  c.run_stage(3, {});
  c.run_stage(4, {});
  EXPECT_EQ(strat->state({Side::P, 0}).tau, 2);
}

TEST(Injury, RoutingBelowCertifiedUseRefreshesWithInitialization) {
  Json functionals = Json::array({
      {{"side", 1}, {"e", 0}, {"axioms", Json::array({axj("", "", 0, 0, 0)})}},
      {{"side", 0}, {"e", 1}, {"axioms", Json::array({axj("00", "", 0, 0, 2), axj("10", "", 0, 0, 2)})}},
  });
  Json doc = robinson_doc(8, functionals);
  doc["b"] = Json::array({Json::array({5, 0})});
  const auto res = run(load_scenario(doc));
  const auto injuries = of_kind(res.trace, "injury");
  ASSERT_EQ(injuries.size(), 1u);
  EXPECT_EQ(injuries[0].stage, 5);
  EXPECT_EQ(injuries[0].get("req"), "P:1");
  EXPECT_EQ(injuries[0].get("x"), "0");
  bool init = false;
  for (const auto& ev : of_kind(res.trace, "initialize", 5)) init |= ev.get("block") == "L:1";
  EXPECT_TRUE(init);
  // The refreshed input gets a new guessing set when it certifies again.
  const auto certs = of_kind(res.trace, "certify");
  std::set<std::string> js;
  for (const auto& ev : certs)
    if (ev.get("req") == "P:1") js.insert(ev.get("j"));
  EXPECT_GE(js.size(), 2u);
}

TEST(Injury, InitializationBumpsEveryEpoch) {
  Scenario sc = load_scenario(robinson_doc(8, p_axioms(0, {axj("", "", 0, 0, 0), axj("", "", 1, 0, 0)})));
  auto owned = std::make_unique<RobinsonStrategy>(sc.functionals, EnumerationSchedule(Role::C), sc.p_policy,
                                                  sc.q_default, sc.q_overrides, sc.horizon);
  RobinsonStrategy* strat = owned.get();
  Construction c(Horizon(sc.horizon), std::move(owned));
  for (Stage s = 0; s <= 2; ++s) c.run_stage(s, {});
  const auto& before = strat->state({Side::P, 0});
  ASSERT_EQ(before.inputs.size(), 2u);
  const int e0 = before.inputs.at(0).epoch, e1 = before.inputs.at(1).epoch;
  const int old_j = *before.inputs.at(0).j;
  strat->initialize_requirement(c, {Side::P, 0}, 2);
  strat->apply_injury_and_refresh(c, 2);
  const auto& after = strat->state({Side::P, 0});
  EXPECT_GT(after.inputs.at(0).epoch, e0);
  EXPECT_GT(after.inputs.at(1).epoch, e1);
  EXPECT_TRUE(after.inputs.at(0).certified.empty());
  EXPECT_THROW(strat->certify({Side::P, 0}, 0, old_j, axiom("", ""), 2), std::logic_error);
}

}  // namespace
}  // namespace splitsim

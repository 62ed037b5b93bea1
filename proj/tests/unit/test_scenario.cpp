#include <gtest/gtest.h>

#include "splitsim/scenario.hpp"

namespace splitsim {
namespace {

Json minimal() { return {{"horizon", 4}, {"construction", "sacks"}, {"b", Json::array()}, {"d", Json::array()}}; }

bool mentions(const ValidationError& err, std::string_view path) {
  for (const auto& issue : err.issues())
    if (issue.path == path) return true;
  return false;
}

std::string error_path_of(const Json& doc, std::string_view path) {
  try {
    load_scenario(doc);
  } catch (const ValidationError& err) {
    return mentions(err, path) ? std::string(path) : std::string(err.what());
  }
  return "accepted";
}

TEST(LoadScenario, Minimal) {
  const Scenario sc = load_scenario(minimal());
  EXPECT_EQ(sc.horizon, 4);
  EXPECT_EQ(sc.construction, ConstructionKind::Sacks);
  EXPECT_TRUE(sc.functionals.empty());
  EXPECT_EQ(sc.q_default, 2);
}

TEST(LoadScenario, Rejections) {
  Json two_at_three = minimal();
  two_at_three["b"] = Json::array({Json::array({3, 0}), Json::array({3, 1})});
  EXPECT_THROW(load_scenario(two_at_three), ValidationError);

  Json even = minimal();
  even["b"] = Json::array({Json::array({2, 0})});
  EXPECT_THROW(load_scenario(even), ValidationError);

  Json conflict = minimal();
  conflict["functionals"] = Json::array({{{"side", 0}, {"e", 0}, {"axioms", Json::array({
      {{"theta", "0"}, {"x", 0}, {"k", 0}, {"stage", 1}},
      {{"theta", "01"}, {"x", 0}, {"k", 1}, {"stage", 2}},
  })}}});
  EXPECT_EQ(error_path_of(conflict, "$.functionals[0].axioms[1]"), "$.functionals[0].axioms[1]");

  Json unknown = minimal();
  unknown["colour"] = "blue";
  EXPECT_THROW(load_scenario(unknown), ValidationError);

  Json big = minimal();
  big["b"] = Json::array({Json::array({1, 4})});
  EXPECT_THROW(load_scenario(big), ValidationError);

  Json early_use = minimal();
  early_use["functionals"] =
      Json::array({{{"side", 0}, {"e", 0}, {"axioms", Json::array({{{"theta", "000"}, {"x", 0}, {"k", 0}, {"stage", 2}}})}}});
  EXPECT_THROW(load_scenario(early_use), ValidationError);

  Json sigma_in_sacks = minimal();
  sigma_in_sacks["functionals"] = Json::array(
      {{{"side", 0}, {"e", 0}, {"axioms", Json::array({{{"theta", ""}, {"sigma", "0"}, {"x", 0}, {"k", 0}, {"stage", 1}}})}}});
  EXPECT_THROW(load_scenario(sigma_in_sacks), ValidationError);

  EXPECT_THROW(load_scenario_text("{not json"), ValidationError);
  EXPECT_THROW(load_scenario(Json::array()), ValidationError);
}

TEST(LoadScenario, PoliciesAndDefaults) {
  Json doc = minimal();
  doc["construction"] = "robinson";
  doc["c"] = Json::array({Json::array({0, 1}), Json::array({2, 0})});
  doc["d"] = {{"policy", "anti-delta"}, {"params", {{"limit", 2}}}};
  doc["p_policy"] = {{"type", "table"}, {"values", {{"0", Json::array({1, 3})}}}};
  const Scenario sc = load_scenario(doc);
  EXPECT_EQ(sc.q_default, 2 * 2 + 2);
  ASSERT_TRUE(sc.d_policy);
  EXPECT_EQ(sc.d_policy->limit, 2);
  EXPECT_EQ(sc.p_policy.kind, PPolicy::kTable);
  EXPECT_EQ(sc.p_policy.toggles.at(0), (std::vector<Stage>{1, 3}));
}

TEST(LoadScenario, ChurnExpansionIsSeededAndRoundTrips) {
  Json doc = minimal();
  doc["horizon"] = 40;
  doc["construction"] = "robinson";
  doc["seed"] = 9;
  doc["c"] = {{"policy", "churn-C"}, {"params", {{"count", 5}, {"below", 6}}}};
  const Scenario a = load_scenario(doc), b = load_scenario(doc);
  EXPECT_EQ(a.c, b.c);
  EXPECT_EQ(a.c.size(), 5u);
  for (const auto& arr : a.c) EXPECT_LT(arr.element, 6);
  const Scenario again = load_scenario(scenario_to_json(a));
  EXPECT_EQ(again.c, a.c);
  EXPECT_EQ(scenario_to_json(again), scenario_to_json(a));
}

TEST(Run, EmptyScenarioOnlyUpdatesAndPartTwoMarkers) {
  const auto res = run(load_scenario(minimal()));
  for (const auto& ev : res.trace) EXPECT_TRUE(ev.kind == "assignment-update" || ev.kind == "part2-end") << ev.format();
  int updates = 0;
  for (const auto& ev : res.trace) updates += ev.kind == "assignment-update";
  EXPECT_EQ(updates, 5);
}

TEST(Run, SingleArrivalGoesToA0) {
  Json doc = minimal();
  doc["b"] = Json::array({Json::array({1, 2})});
  const auto res = run(load_scenario(doc));
  int routes = 0;
  for (const auto& ev : res.trace)
    if (ev.kind == "route") {
      ++routes;
      EXPECT_EQ(ev.get("target"), "A0");
    }
  EXPECT_EQ(routes, 1);
  EXPECT_EQ(res.final.a0, std::vector<Natural>{2});
  EXPECT_TRUE(res.final.a1.empty());
}

TEST(Run, DeterministicAcrossCalls) {
  Json doc = minimal();
  doc["horizon"] = 30;
  doc["b"] = Json::array({Json::array({1, 3}), Json::array({5, 1}), Json::array({9, 0})});
  doc["d"] = {{"policy", "anti-delta"}};
  doc["functionals"] = Json::array(
      {{{"side", 0}, {"e", 0}, {"axioms", Json::array({{{"theta", ""}, {"x", 0}, {"k", 0}, {"stage", 0}}})}},
       {{"side", 1}, {"e", 1}, {"axioms", Json::array({{{"theta", "1"}, {"x", 1}, {"k", 0}, {"stage", 4}}})}}});
  const Scenario sc = load_scenario(doc);
  EXPECT_EQ(format_trace(run(sc).trace), format_trace(run(sc).trace));
}

}  // namespace
}  // namespace splitsim

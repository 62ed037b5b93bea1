#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "splitsim/corrupt.hpp"
#include "splitsim/explain.hpp"
#include "splitsim/fuzz.hpp"
#include "splitsim/verifier.hpp"

namespace splitsim {
namespace {

std::string read(const std::string& name) {
  std::ifstream in(std::string(SPLITSIM_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Verify, EmptyScenarioPassesOrSkips) {
  const Scenario sc = load_scenario(Json{{"horizon", 4}, {"construction", "sacks"}});
  const auto res = run(sc);
  const auto rep = verify(sc, res.trace, &res.final);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.checks.size(), check_ids().size());
  EXPECT_TRUE(rep.settled());
}

TEST(Verify, ReportJsonShape) {
  const Scenario sc = load_scenario_text(read("anti_delta.json"));
  const auto res = run(sc);
  const Json j = verify(sc, res.trace, &res.final).to_json();
  EXPECT_TRUE(j.contains("checks"));
  EXPECT_TRUE(j.contains("flags"));
  EXPECT_TRUE(j.contains("diagnostics"));
  EXPECT_EQ(j["checks"].size(), 11u);
}

TEST(Verify, RisingLambdaIsCaughtWithWitness) {
  const Scenario sc = load_scenario_text(read("anti_delta.json"));
  const Trace bad = corrupt_trace(sc, run(sc).trace, "V3");
  const auto rep = verify(sc, bad);
  const auto& v3 = rep.check("V3");
  EXPECT_EQ(v3.status, CheckStatus::Fail);
  EXPECT_TRUE(v3.witness_stage);
  EXPECT_FALSE(v3.witness_events.empty());
}

TEST(Verify, UnknownCorruptionIdRejected) {
  const Scenario sc = load_scenario_text(read("anti_delta.json"));
  EXPECT_THROW(corrupt_trace(sc, run(sc).trace, "V99"), std::invalid_argument);
}

TEST(Verify, SacksOnlyCorruptionsAreInapplicableToSacks) {
  const Scenario sc = load_scenario_text(read("anti_delta.json"));
  EXPECT_THROW(corrupt_trace(sc, run(sc).trace, "V7"), CorruptionInapplicable);
}

TEST(Verify, TraceFromOtherScenarioFails) {
  const Scenario a = load_scenario_text(read("anti_delta.json"));
  const Scenario b = load_scenario_text(read("lambda_update.json"));
  EXPECT_FALSE(verify(b, run(a).trace).passed());
}

TEST(Verify, TruncatedTraceFails) {
  const Scenario sc = load_scenario_text(read("robinson_rich.json"));
  Trace t = run(sc).trace;
  t.resize(t.size() / 2);
  EXPECT_FALSE(verify(sc, t).passed());
}

TEST(Fuzz, DeterministicAndValid) {
  FuzzParams p;
  const auto a = fuzz(0, 1, p);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(scenario_to_json(a[0]), scenario_to_json(fuzz(0, 1, p)[0]));
  std::set<std::string> distinct;
  for (std::uint64_t seed = 0; seed < 100; ++seed) distinct.insert(scenario_to_json(generate_scenario(seed, 0, p)).dump());
  EXPECT_EQ(distinct.size(), 100u);
}

TEST(Fuzz, SmallSweepPasses) {
  for (auto kind : {ConstructionKind::Sacks, ConstructionKind::Robinson}) {
    FuzzParams p;
    p.construction = kind;
    p.max_horizon = 64;
    const FuzzSummary s = run_fuzz(7, 50, p);
    EXPECT_EQ(s.rows.size(), 50u);
    EXPECT_EQ(s.failed, 0);
  }
}

TEST(Explain, Filters) {
  EXPECT_TRUE(explain({}, {}).empty());
  const Trace t = parse_trace(read("anti_delta.trace"));
  const auto blk = parse_block_filter("U:0");
  ASSERT_TRUE(blk);
  const auto lines = explain(t, *blk);
  ASSERT_EQ(lines.size(), 2u);  // initialized at stages 0 and 2
  EXPECT_NE(lines[0].find("initialize"), std::string::npos);
  EXPECT_FALSE(parse_block_filter("Z:1"));
  EXPECT_FALSE(parse_block_filter("-1"));

  ExplainFilter req;
  req.requirement = RequirementId{Side::P, 0};
  const auto p0 = explain(t, req);
  ASSERT_EQ(p0.size(), 3u);
  EXPECT_NE(p0[2].find("diagonalize"), std::string::npos);
}

}  // namespace
}  // namespace splitsim

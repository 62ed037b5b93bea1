#include <gtest/gtest.h>

#include <random>

#include "splitsim/core_model.hpp"

namespace splitsim {
namespace {

BitString bits(std::string_view s) { return BitString::parse(s); }

Snapshot snap_of(std::initializer_list<Natural> xs) {
  Snapshot s;
  for (Natural x : xs) s.insert(x);
  return s;
}

TEST(Pairing, Examples) {
  EXPECT_EQ(pair(0, 0), 0u);
  EXPECT_EQ(pair(1, 2), 8u);
  EXPECT_EQ(pair(2, 1), 7u);
  EXPECT_EQ(unpair(0), (std::pair<Natural, Natural>{0, 0}));
  EXPECT_EQ(unpair(8), (std::pair<Natural, Natural>{1, 2}));
  EXPECT_EQ(unpair(7), (std::pair<Natural, Natural>{2, 1}));
}

TEST(Pairing, MatchesDiagonalWalk) {
  // Walk the anti-diagonals a+b = 0, 1, 2, ... in order of increasing b.
  Natural code = 0;
  for (Natural d = 0; d < 60; ++d) {
    for (Natural b = 0; b <= d; ++b, ++code) {
      const Natural a = d - b;
      ASSERT_EQ(pair(a, b), code);
      ASSERT_EQ(unpair(code), std::make_pair(a, b));
    }
  }
}

TEST(Pairing, RoundTripLargeValues) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const Natural a = rng() % 3000000, b = rng() % 3000000;
    ASSERT_EQ(unpair(pair(a, b)), std::make_pair(a, b));
  }
}

TEST(BitStringTest, ParseAndPrefix) {
  EXPECT_EQ(bits("0101").str(), "0101");
  EXPECT_TRUE(bits("").is_prefix_of(bits("1")));
  EXPECT_TRUE(bits("01").is_prefix_of(bits("011")));
  EXPECT_FALSE(bits("011").is_prefix_of(bits("01")));
  EXPECT_TRUE(compatible(bits("011"), bits("01")));
  EXPECT_FALSE(compatible(bits("00"), bits("01")));
  EXPECT_THROW(BitString::parse("01a"), std::invalid_argument);
}

TEST(Schedule, SnapshotExamples) {
  EnumerationSchedule empty;
  EXPECT_TRUE(empty.snapshot(5).members().empty());

  EnumerationSchedule one;
  one.add(1, 5);
  EXPECT_TRUE(one.snapshot(0).members().empty());
  EXPECT_EQ(one.snapshot(1).members(), std::vector<Natural>{5});

  EnumerationSchedule two;
  two.add(1, 5);
  two.add(3, 2);
  EXPECT_EQ(two.snapshot(3).members(), (std::vector<Natural>{2, 5}));
}

TEST(Schedule, RejectsReenumeration) {
  EnumerationSchedule s;
  s.add(1, 5);
  EXPECT_THROW(s.add(3, 5), ScheduleError);
}

TEST(Schedule, SnapshotsAreMonotoneAndCumulative) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    EnumerationSchedule sched;
    std::vector<std::pair<Stage, Natural>> raw;
    for (Natural x = 0; x < 30; ++x)
      if (rng() % 2) {
        const Stage st = static_cast<Stage>(rng() % 40);
        sched.add(st, x);
        raw.emplace_back(st, x);
      }
    for (Stage s = 0; s <= 40; ++s) {
      const Snapshot now = sched.snapshot(s);
      for (Natural x = 0; x < 30; ++x) {
        bool expected = false;
        for (auto [st, y] : raw) expected |= (y == x && st <= s);
        ASSERT_EQ(now.contains(x), expected) << "x=" << x << " s=" << s;
      }
      if (s > 0)
        for (Natural x : sched.snapshot(s - 1).members()) ASSERT_TRUE(now.contains(x));
    }
  }
}

TEST(Cone, Examples) {
  EXPECT_TRUE(in_cone(bits(""), snap_of({3, 9})));
  EXPECT_TRUE(in_cone(bits("010"), snap_of({1})));
  EXPECT_FALSE(in_cone(bits("010"), snap_of({0, 1})));
}

TEST(Cone, WindowMatchesStagewiseCheck) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    EnumerationSchedule sched(Role::C);
    for (Natural x = 0; x < 6; ++x)
      if (rng() % 3 == 0) sched.add(static_cast<Stage>(rng() % 20), x);
    std::string text;
    for (std::size_t i = 0, n = rng() % 6; i < n; ++i) text += (rng() % 4 == 0) ? '1' : '0';
    const BitString sigma = bits(text);
    const ConeWindow w = cone_window(sigma, sched);
    for (Stage t = 0; t <= 25; ++t)
      ASSERT_EQ(w.contains(t), in_cone(sigma, sched.snapshot(t))) << "sigma=" << text << " t=" << t;
  }
}

FunctionalTable table(std::vector<StagedAxiom> axioms) {
  return FunctionalTable(FunctionalId{Side::P, 0}, std::move(axioms));
}

StagedAxiom ax(std::string_view theta, Natural x, int k, Stage appear) {
  return StagedAxiom{appear, Axiom{bits(theta), std::nullopt, x, k}};
}

TEST(Evaluate, Examples) {
  EXPECT_EQ(evaluate(table({}), 3, Snapshot{}, nullptr, 0), Outcome::divergent());
  const FunctionalTable t = table({ax("00", 0, 1, 2)});
  EXPECT_EQ(evaluate(t, 2, Snapshot{}, nullptr, 0), Outcome::converge(1, 2));
  EXPECT_EQ(evaluate(t, 1, Snapshot{}, nullptr, 0), Outcome::divergent());
}

TEST(Evaluate, OracleSideRequiresSigma) {
  FunctionalTable t(FunctionalId{Side::Q, 1},
                    {StagedAxiom{0, Axiom{bits("1"), bits("01"), 0, 1}}});
  const Snapshot a = snap_of({0});
  EXPECT_EQ(evaluate(t, 4, a, nullptr, 0), Outcome::divergent());
  const Snapshot c_in = snap_of({1});
  const Snapshot c_out = snap_of({0, 1});
  EXPECT_EQ(evaluate(t, 4, a, &c_in, 0), Outcome::converge(1, 1));  // use counts the A-side string
  EXPECT_EQ(evaluate(t, 4, a, &c_out, 0), Outcome::divergent());
}

TEST(Evaluate, AgreesWithBruteForce) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    // A consistent table: outputs are a fixed function of (x, theta[0]).
    std::vector<StagedAxiom> axioms;
    for (int i = 0, n = static_cast<int>(rng() % 8); i < n; ++i) {
      std::string theta;
      for (std::size_t j = 0, len = 1 + rng() % 4; j < len; ++j) theta += (rng() % 2) ? '1' : '0';
      const Natural x = rng() % 3;
      const int k = static_cast<int>((x + (theta[0] == '1')) % 2);
      axioms.push_back(ax(theta, x, k, static_cast<Stage>(rng() % 6)));
    }
    const FunctionalTable t = table(axioms);
    ASSERT_TRUE(validate_consistency(t).empty());
    Snapshot a;
    for (Natural y = 0; y < 4; ++y)
      if (rng() % 2) a.insert(y);
    for (Stage s = 0; s < 7; ++s)
      for (Natural x = 0; x < 3; ++x) {
        std::optional<std::pair<std::size_t, int>> best;  // (use, k)
        for (const auto& sa : axioms) {
          if (sa.appear > s || sa.axiom.x != x) continue;
          bool ok = true;
          for (std::size_t i = 0; i < sa.axiom.theta.size(); ++i) ok &= sa.axiom.theta[i] == a.contains(i);
          if (ok && (!best || std::make_pair(sa.axiom.use(), sa.axiom.k) < *best))
            best = std::make_pair(sa.axiom.use(), sa.axiom.k);
        }
        const Outcome got = evaluate(t, s, a, nullptr, x);
        if (best)
          ASSERT_EQ(got, Outcome::converge(best->second, best->first));
        else
          ASSERT_FALSE(got.convergent);
      }
  }
}

TEST(Consistency, Examples) {
  EXPECT_TRUE(validate_consistency(table({})).empty());
  EXPECT_EQ(validate_consistency(table({ax("0", 0, 0, 0), ax("01", 0, 1, 0)})).size(), 1u);
  EXPECT_TRUE(validate_consistency(table({ax("0", 0, 0, 0), ax("1", 0, 1, 0)})).empty());
}

TEST(Consistency, SameOutputOrDifferentInputIsFine) {
  EXPECT_TRUE(validate_consistency(table({ax("0", 0, 1, 0), ax("01", 0, 1, 0)})).empty());
  EXPECT_TRUE(validate_consistency(table({ax("0", 0, 1, 0), ax("01", 1, 0, 0)})).empty());
}

}  // namespace
}  // namespace splitsim

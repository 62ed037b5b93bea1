#include <gtest/gtest.h>

#include "splitsim/trace.hpp"

namespace splitsim {
namespace {

TEST(Trace, FormatSortsKeys) {
  TraceEvent ev(4, event_kind::kRoute);
  ev.set("target", "A1").set("element", 7).set("block", "L:2");
  EXPECT_EQ(ev.format(), "stage=4\tkind=route\tblock=L:2\telement=7\ttarget=A1");
}

TEST(Trace, RoundTrip) {
  Trace t;
  t.push_back(TraceEvent(0, event_kind::kDefineLocal).set("sigma", "").set("x", 0).set("k", 1).set("req", "P:0"));
  t.push_back(TraceEvent(1, event_kind::kEnumerate).set("element", 3).set("set", "B"));
  t.push_back(TraceEvent(2, event_kind::kFlag).set("flag", "unsettled").set("j", 4));
  const std::string text = format_trace(t);
  EXPECT_EQ(parse_trace(text), t);
  EXPECT_EQ(format_trace(parse_trace(text)), text);
  EXPECT_EQ(t[0].get_int("x"), 0);
  EXPECT_EQ(t[0].get("sigma"), "");
  EXPECT_FALSE(t[1].find("x"));
}

TEST(Trace, EmptyTextIsEmptyTrace) { EXPECT_TRUE(parse_trace("").empty()); }

TEST(Trace, RejectsMalformedLines) {
  EXPECT_THROW(parse_trace("kind=route\tstage=1\n"), TraceParseError);
  EXPECT_THROW(parse_trace("stage=x\tkind=route\n"), TraceParseError);
  EXPECT_THROW(parse_trace("stage=1\tkind=teleport\n"), TraceParseError);
  EXPECT_THROW(parse_trace("stage=1\tkind=route\telement\n"), TraceParseError);
  EXPECT_THROW(parse_trace("stage=1\tkind=route\tx=1\tx=2\n"), TraceParseError);
  EXPECT_THROW(parse_trace("stage=1\tkind=route\ttarget=A0\telement=1\n"), TraceParseError);
}

TEST(Trace, MissingKeyThrows) {
  TraceEvent ev(0, event_kind::kAct);
  EXPECT_THROW(ev.get("req"), TraceParseError);
}

}  // namespace
}  // namespace splitsim

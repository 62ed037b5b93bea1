#include "splitsim/explain.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace splitsim {

namespace {

constexpr std::array kChronology = {
    event_kind::kInitialize, event_kind::kExpansionary,  event_kind::kDiagonalize, event_kind::kDefineLocal,
    event_kind::kCertify,    event_kind::kRefuseCertify, event_kind::kInjury,      event_kind::kRestraintSet,
};

bool in_chronology(std::string_view kind) {
  for (auto k : kChronology)
    if (k == kind) return true;
  return false;
}

bool matches(const TraceEvent& ev, const ExplainFilter& f) {
  if (f.block || f.block_index) {
    const auto label = ev.find("block");
    if (!label) return false;
    const auto blk = parse_block_label(*label);
    if (!blk) return false;
    if (f.block && *blk != *f.block) return false;
    if (f.block_index && blk->index != *f.block_index) return false;
  }
  if (f.requirement && ev.find("req") != requirement_label(*f.requirement)) return false;
  if (f.input) {
    const auto x = ev.find("x");
    if (!x || *x != std::to_string(*f.input)) return false;
  }
  return true;
}

}  // namespace

std::optional<ExplainFilter> parse_block_filter(std::string_view text, ExplainFilter base) {
  if (auto blk = parse_block_label(text)) {
    base.block = *blk;
    return base;
  }
  int i = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (ec != std::errc() || ptr != text.data() + text.size() || i < 0 || text.empty()) return std::nullopt;
  base.block_index = i;
  return base;
}

std::vector<std::string> explain(const Trace& trace, const ExplainFilter& filter) {
  std::vector<std::string> lines;
  for (const auto& ev : trace) {
    if (!in_chronology(ev.kind) || !matches(ev, filter)) continue;
    char head[48];
    std::snprintf(head, sizeof head, "%6d  %-15s", ev.stage, ev.kind.c_str());
    std::string line = head;
    const auto subject = ev.find("req") ? ev.find("req") : ev.find("block");
    if (subject) line += " " + *subject;
    for (const auto& [k, v] : ev.payload) {
      if ((k == "req" || k == "block") && subject && v == *subject) continue;
      line += " " + k + "=" + (v.empty() ? "\"\"" : v);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace splitsim

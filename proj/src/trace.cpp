#include "splitsim/trace.hpp"

#include <array>
#include <charconv>

namespace splitsim {

namespace {

constexpr std::array kKinds = {
    event_kind::kEnumerate,     event_kind::kRoute,        event_kind::kInitialize,
    event_kind::kAct,           event_kind::kExpansionary, event_kind::kDiagonalize,
    event_kind::kCertify,       event_kind::kRefuseCertify, event_kind::kDefineLocal,
    event_kind::kRestraintSet,  event_kind::kAssignmentUpdate, event_kind::kInjury,
    event_kind::kPart2End,      event_kind::kFlag,
};

long long parse_int(std::string_view text, std::string_view what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw TraceParseError("bad integer for " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

}  // namespace

bool is_known_kind(std::string_view kind) {
  for (auto k : kKinds)
    if (k == kind) return true;
  return false;
}

TraceEvent& TraceEvent::set(std::string key, std::string value) {
  payload[std::move(key)] = std::move(value);
  return *this;
}

TraceEvent& TraceEvent::set(std::string key, long long value) {
  payload[std::move(key)] = std::to_string(value);
  return *this;
}

const std::string& TraceEvent::get(const std::string& key) const {
  auto it = payload.find(key);
  if (it == payload.end()) throw TraceParseError("event '" + kind + "' lacks key '" + key + "'");
  return it->second;
}

long long TraceEvent::get_int(const std::string& key) const { return parse_int(get(key), key); }

std::optional<std::string> TraceEvent::find(const std::string& key) const {
  auto it = payload.find(key);
  if (it == payload.end()) return std::nullopt;
  return it->second;
}

std::string TraceEvent::format() const {
  std::string out = "stage=" + std::to_string(stage) + "\tkind=" + kind;
  for (const auto& [k, v] : payload) {
    out += '\t';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

TraceEvent TraceEvent::parse(std::string_view line) {
  TraceEvent ev;
  bool have_stage = false;
  bool have_kind = false;
  std::size_t pos = 0;
  int field = 0;
  while (pos <= line.size()) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) tab = line.size();
    std::string_view token = line.substr(pos, tab - pos);
    std::size_t eq = token.find('=');
    if (eq == std::string_view::npos) throw TraceParseError("field without '=': '" + std::string(token) + "'");
    std::string_view key = token.substr(0, eq);
    std::string_view value = token.substr(eq + 1);
    if (field == 0) {
      if (key != "stage") throw TraceParseError("line must start with stage=");
      ev.stage = static_cast<Stage>(parse_int(value, "stage"));
      have_stage = true;
    } else if (field == 1) {
      if (key != "kind") throw TraceParseError("second field must be kind=");
      if (!is_known_kind(value)) throw TraceParseError("unknown event kind '" + std::string(value) + "'");
      ev.kind = std::string(value);
      have_kind = true;
    } else {
      if (!ev.payload.empty() && ev.payload.rbegin()->first >= key)
        throw TraceParseError("payload keys out of order at '" + std::string(key) + "'");
      ev.payload.emplace(std::string(key), std::string(value));
    }
    ++field;
    pos = tab + 1;
  }
  if (!have_stage || !have_kind) throw TraceParseError("incomplete event line");
  return ev;
}

std::string format_trace(const Trace& trace) {
  std::string out;
  for (const auto& ev : trace) {
    out += ev.format();
    out += '\n';
  }
  return out;
}

Trace parse_trace(std::string_view text) {
  Trace trace;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      try {
        trace.push_back(TraceEvent::parse(line));
      } catch (const TraceParseError& err) {
        throw TraceParseError("line " + std::to_string(line_no) + ": " + err.what());
      }
    }
    pos = nl + 1;
  }
  return trace;
}

}  // namespace splitsim

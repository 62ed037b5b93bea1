#pragma once

// Trace events: one tab-separated line per event,
//   stage=<s>\tkind=<kind>\t<key>=<value>...
// with payload keys in lexicographic order.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "splitsim/core_model.hpp"

namespace splitsim {

namespace event_kind {
inline constexpr std::string_view kEnumerate = "enumerate";
inline constexpr std::string_view kRoute = "route";
inline constexpr std::string_view kInitialize = "initialize";
inline constexpr std::string_view kAct = "act";
inline constexpr std::string_view kExpansionary = "expansionary";
inline constexpr std::string_view kDiagonalize = "diagonalize";
inline constexpr std::string_view kCertify = "certify";
inline constexpr std::string_view kRefuseCertify = "refuse-certify";
inline constexpr std::string_view kDefineLocal = "define-local";
inline constexpr std::string_view kRestraintSet = "restraint-set";
inline constexpr std::string_view kAssignmentUpdate = "assignment-update";
inline constexpr std::string_view kInjury = "injury";
// Marks how Part II ended at an even stage: reason=acted or reason=reached.
inline constexpr std::string_view kPart2End = "part2-end";
// Run-level flags: unsettled, p-contract-violated.
inline constexpr std::string_view kFlag = "flag";
}  // namespace event_kind

bool is_known_kind(std::string_view kind);

class TraceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceEvent {
  Stage stage = 0;
  std::string kind;
  std::map<std::string, std::string> payload;

  TraceEvent() = default;
  TraceEvent(Stage s, std::string_view k) : stage(s), kind(k) {}

  TraceEvent& set(std::string key, std::string value);
  TraceEvent& set(std::string key, long long value);

  bool has(const std::string& key) const { return payload.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  std::string format() const;
  static TraceEvent parse(std::string_view line);

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

std::string format_trace(const Trace& trace);
Trace parse_trace(std::string_view text);

}  // namespace splitsim

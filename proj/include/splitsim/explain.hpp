#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splitsim/engine.hpp"

namespace splitsim {

struct ExplainFilter {
  std::optional<BlockId> block;
  std::optional<int> block_index;  // both L:i and U:i
  std::optional<RequirementId> requirement;
  std::optional<int> input;
};

/// "L:2", "U:0" or a bare index; nullopt when malformed.
std::optional<ExplainFilter> parse_block_filter(std::string_view text, ExplainFilter base = {});

/// Chronology of initializations, expansionary stages, diagonalizations,
/// local definitions, certifications, injuries, and restraints that match
/// every given filter, one line per event.
std::vector<std::string> explain(const Trace& trace, const ExplainFilter& filter);

}  // namespace splitsim

#pragma once

// Deliberate trace corruptions, one per verifier check, used as negative
// controls. Not part of any stable interface.

#include <stdexcept>
#include <string_view>

#include "splitsim/scenario.hpp"

namespace splitsim {

class CorruptionInapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Returns a copy of `trace` that the check `check_id` ("V1".."V11") must
/// reject. Throws CorruptionInapplicable when the trace lacks the material
/// the corruption needs, std::invalid_argument for an unknown id.
Trace corrupt_trace(const Scenario& sc, Trace trace, std::string_view check_id);

}  // namespace splitsim

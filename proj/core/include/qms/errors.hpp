#pragma once

#include <stdexcept>
#include <string>

namespace qms {

// Resource guards: enumeration limits, grid-size caps, branch truncation.
// Distinct from std::invalid_argument so callers (and the CLI exit codes)
// can tell configuration mistakes from runtime limits.
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qms

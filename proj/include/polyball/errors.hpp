#pragma once

#include <stdexcept>

namespace polyball {

// Error categories the CLI maps onto process exit codes: domain violations
// exit 2, exceeded enumeration guards exit 3, failed invariant checks exit 4.

struct DomainViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace polyball

#pragma once
#include <stdexcept>
#include <string>

namespace bl {

// Exit-code mapping used by the CLI: ConfigError/RegimeRefusal -> 2,
// SolverError -> 3, AcceptanceViolation -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configuration that falls outside the hypotheses of the formula that was
// requested. Never silently replaced by a default.
struct RegimeRefusal : ConfigError {
  using ConfigError::ConfigError;
};

struct AcceptanceViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bl

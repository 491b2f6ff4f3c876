#pragma once

#include <stdexcept>
#include <string>

namespace coevo {

// Input that violates an operation's stated domain.
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// KL(p || q) requested where q is zero on p's support.
struct DivergenceUndefinedError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

// Inconsistent wiring between pipeline stages (a caller bug, not bad data).
struct PipelineError : std::logic_error {
  using std::logic_error::logic_error;
};

// Bad or incompatible configuration, credentials, or file formats.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Remote endpoint failure after exhausting retries. last_status 0 means the
// request never produced an HTTP response.
struct TransportError : std::runtime_error {
  TransportError(const std::string& what, int status)
      : std::runtime_error(what), last_status(status) {}
  int last_status;
};

// Curation kept nothing; the loop cannot continue and must surface this.
struct EmptyCurriculumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace coevo

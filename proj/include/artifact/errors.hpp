#pragma once
#include <stdexcept>
#include <string>

namespace cr {

// Invalid configuration or parameter values. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Precondition violation on an operation argument.
struct DomainError : ConfigError {
  using ConfigError::ConfigError;
};

// A numerical routine failed to converge. Carries the partial estimate so
// callers can decide whether it is still usable. CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  double partial;
  NumericalError(const std::string& msg, double partial_estimate)
      : std::runtime_error(msg), partial(partial_estimate) {}
};

}  // namespace cr

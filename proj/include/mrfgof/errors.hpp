#pragma once

#include <stdexcept>
#include <string>

namespace mrfgof {

// Bad user input: malformed templates, parameters outside their space,
// inconsistent options. The CLI maps this to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unreadable or inconsistent data files (exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Factorization failures, singular designs, optimizer breakdowns (exit code 4).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mrfgof

#pragma once

#include <stdexcept>

namespace rscf {

// Bad user-supplied parameters (dimensions, ranges, unknown tags).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Channel inputs that make the problem ill-posed (all-zero gains etc.).
struct DegenerateChannelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested split leaves no power for the private streams.
struct PowerBudgetError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace rscf

#pragma once

#include <stdexcept>
#include <string>

namespace wavebox {

// Construction-time constraint violations; the message names the offending
// parameter or invariant.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Quadrature or integrator failed to reach its documented tolerance.
struct accuracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values detected during time stepping; message names the step.
struct instability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate analysis input (zero state, zero denominator).
struct degenerate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wavebox

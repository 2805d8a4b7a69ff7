#pragma once

#include <stdexcept>
#include <string>

namespace emqs {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Zero/tiny pivot or residual check failure in the direct solver. On systems
/// flagged expected_singular this is the correct outcome.
struct SingularMatrixError : SolverError {
  using SolverError::SolverError;
};

/// omega = 0 is rejected: the static limit is out of scope and potential
/// formulations lose conditioning as omega tends to zero.
struct StaticLimitError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace emqs

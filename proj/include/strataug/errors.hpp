#pragma once

#include <stdexcept>
#include <string>

namespace strataug {

// Invalid user-facing configuration: CLI flags, config files, input schemas.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Estimation cannot proceed (empty arm, too few rows, ...).
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Design matrix is rank deficient; `column` is the original index of the
// first column that is linearly dependent on the preceding ones.
struct SingularDesignError : EstimationError {
  int column;
  explicit SingularDesignError(int col)
      : EstimationError("singular design matrix: column " + std::to_string(col) +
                        " is linearly dependent on the others"),
        column(col) {}
};

// Logistic likelihood has no finite maximizer (separated data), or IRLS
// failed to converge within the iteration cap.
struct SeparationError : EstimationError {
  using EstimationError::EstimationError;
};

}  // namespace strataug

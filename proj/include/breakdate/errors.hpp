#pragma once

#include <stdexcept>
#include <string>

namespace breakdate {

// Bad user input: malformed panels, out-of-range parameters, unparsable
// files. The CLI maps these to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerically degenerate situations detected at runtime. Exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The jackknife Frobenius estimate is not positive: the panel carries no
// usable noise, so the plug-in rate and the bootstraps are undefined.
class FlatPanelError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A diagonal entry of the pooled covariance vanished (constant column),
// so the correlation matrix cannot be formed.
class DiagonalDegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A matrix that must be positive semi-definite failed to factor even
// after eigenvalue flooring.
class NotPsdError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Estimated mean difference is exactly zero, leaving the signal-to-noise
// ratio of the least-squares interval undefined.
class DegenerateSignalError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace breakdate

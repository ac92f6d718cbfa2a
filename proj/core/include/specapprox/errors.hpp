#pragma once

#include <stdexcept>
#include <string>

namespace specapprox {

// Bad argument value (bandwidth, rank, sizes). Maps to CLI exit code 1.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input data: non-finite coordinates, asymmetric matrices,
// dimension mismatches, single-class label vectors.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A row of the affinity matrix sums to zero.
class DegenerateGraphError : public InputError {
 public:
  using InputError::InputError;
};

// Cross-validation folds cannot be formed so that every training split
// contains every class.
class FoldError : public InputError {
 public:
  using InputError::InputError;
};

// Solver failure or an ill-conditioned intermediate. Maps to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every retained eigenvalue of the landmark submatrix is below tolerance.
class DegenerateSubmatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// File could not be opened, read, or written, or ended early. Exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File contents do not follow the expected binary/text layout.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

// Two inputs that must agree (image and label counts) do not.
class ConsistencyError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace specapprox

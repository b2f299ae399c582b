#pragma once

#include <stdexcept>
#include <string>

namespace across {

// Base class for every error raised by the library. CLI maps these to exit
// code 1 (semantic) or 2 (usage), see tools/across_main.cpp.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched vector/row lengths.
struct DimensionError : Error {
  using Error::Error;
};

// Argument outside the supported size range (e.g. enumeration n > 5).
struct SizeError : Error {
  using Error::Error;
};

// Evaluation argument outside [0,1]^N.
struct EvalDomainError : Error {
  using Error::Error;
};

// A radius at or beyond the outer boundary of its factor.
struct OutsideDomainError : Error {
  int factor_index;  // 1-based
  OutsideDomainError(const std::string& msg, int idx) : Error(msg), factor_index(idx) {}
};

// A region that must be nonempty is empty (e.g. obstacle never zero).
struct DegenerateSetError : Error {
  using Error::Error;
};

// Input violates a documented precondition (e.g. unreduced matrix).
struct PreconditionError : Error {
  using Error::Error;
};

// Matrix fails the elementary-cross inclusion gate (some column has no 1);
// the envelope construction is undefined for such matrices.
struct PathologicalCrossError : Error {
  using Error::Error;
};

// Iterative solver did not reach the tolerance within the sweep budget.
struct ConvergenceError : Error {
  double residual;
  ConvergenceError(const std::string& msg, double res) : Error(msg), residual(res) {}
};

// Exact rational arithmetic left the 64-bit range.
struct OverflowError : Error {
  using Error::Error;
};

// Malformed textual input (matrix file, expression, model file).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace across

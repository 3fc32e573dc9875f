#pragma once

#include <stdexcept>
#include <string>

namespace rhoest {

// Base for all library errors. Callers that only care about success/failure
// catch this; the subclasses exist so tests and the CLI can tell them apart.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad range, NaN, wrong size, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// Input is well-formed but degenerate (zero function, all sample points equal).
class DegenerateInput : public Error {
public:
  using Error::Error;
};

// Adaptive Gauss-Legendre failed to reach the requested tolerance.
class QuadratureError : public Error {
public:
  using Error::Error;
};

// The O(|S|^2) pairwise pass would exceed the configured candidate budget.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

// A declared shape (monotone, convex, concave) failed its probe-grid check.
class ShapeViolation : public Error {
public:
  using Error::Error;
};

// Malformed input file or JSON document; the message names the field.
class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace rhoest

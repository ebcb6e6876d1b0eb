#pragma once

#include <stdexcept>
#include <string>

namespace lmpflp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed FLP text; carries the 1-based line of the offending token.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Instance data that parses but violates a model invariant (non-metric, negative cost, ...).
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

// Precondition failures of an operation (bad argument ranges, empty sets, budgets).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when an exhaustive oracle would exceed its enumeration budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// The simplex claims optimality but the recovered point is not feasible within tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lmpflp

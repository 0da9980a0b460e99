#pragma once

#include <stdexcept>
#include <string>

namespace rotavg {

// Malformed or inconsistent caller input (sizes, indices, preconditions).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input that is well-formed but numerically degenerate (rank deficiency).
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

// Quantity undefined for the given input, e.g. a spectral bound on a
// disconnected graph.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical routine hit a state it cannot continue from.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPsdError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RoundingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& what)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what
                            : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace rotavg

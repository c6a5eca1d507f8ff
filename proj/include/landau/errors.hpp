#pragma once

#include <stdexcept>
#include <string>

namespace landau {

/// Input violates an operation's precondition (maps to CLI exit status 2).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// f is nonzero on the outermost velocity layer.
class SupportViolation : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class CflViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hydrodynamic bounds failed mid-run.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file missing, unreadable or malformed (CLI exit status 66).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace landau

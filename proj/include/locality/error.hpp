#pragma once

#include <stdexcept>
#include <string>

namespace locality {

// Base of every error the library throws. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-argument"; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse-error"; }
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "budget-exceeded"; }
};

class StateCapacityExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "state-capacity-exceeded"; }
};

class SamplingExhausted : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "sampling-exhausted"; }
};

class ScaleGuard : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "scale-guard"; }
};

class InvalidLabel : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-label"; }
};

// Internal consistency failures. Seeing one means a bug, not bad input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invariant-violation"; }
};

// Configuration that does not match the experiment schema.
class SchemaError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "schema"; }
};

// An experiment's stated check did not hold.
class CheckFailed : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "check-failed"; }
};

}  // namespace locality

#pragma once

#include <stdexcept>
#include <string>

namespace robucb {

/// Argument outside the mathematical domain of an operation (empty sample,
/// delta outside (0,1), non-finite reward, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of a formula does not hold, e.g. too few samples
/// for the Catoni scale or a bound evaluated outside its validity range.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Configuration or experiment setup rejected before any simulation runs.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Broken internal invariant. Should never be observed.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace robucb

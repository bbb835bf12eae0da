#pragma once

#include <stdexcept>
#include <string>

namespace nltv {

/// Invalid numerical parameter (non-positive gamma, j beyond depth, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point or set outside the domain a function is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal numerical procedure failed (root finder did not converge,
/// search underflow). Always carries enough context to reproduce.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed JSON function description. `where()` names the offending field.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace nltv

#pragma once

#include <stdexcept>
#include <string>

namespace twisted_strata {

/// Violation of a mathematical precondition or invariant (CLI exit status 1).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpecMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class AmbientMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed input text: JSON schema violations, expression syntax (CLI exit status 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twisted_strata

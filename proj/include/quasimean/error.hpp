#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quasimean {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tuple lies outside the domain of a function (or of an arithmetic operation).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The mean of generator images left the generator's range on its bracket.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// A generator failed validation (not strictly increasing on its bracket).
class GeneratorError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `position` is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  explicit ParseError(const std::string& what) : Error(what), position_(0) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A hypothesis that can be observed on a trace was violated (e.g. K > M during compounding).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling never produced a point inside the domain.
class EmptyDomain : public Error {
 public:
  using Error::Error;
};

/// Unknown catalog id, unknown parameter, or similar caller mistakes.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace quasimean

#pragma once

#include <stdexcept>
#include <string>

namespace fin {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file or JSON document.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

/// A scenario invariant does not hold; the message names the offending id.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Unknown or ill-formed unit suffix in a quantity string.
class UnitError : public Error {
 public:
  explicit UnitError(const std::string& what) : Error(what) {}
};

/// Exhaustive search would exceed the configured candidate budget.
class SearchGuardError : public Error {
 public:
  explicit SearchGuardError(const std::string& what) : Error(what) {}
};

}  // namespace fin

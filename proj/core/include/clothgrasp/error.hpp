#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clothgrasp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A local region had too few usable points to describe.
class DegenerateRegion : public Error {
 public:
  using Error::Error;
};

/// A structured-text record failed validation.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace clothgrasp

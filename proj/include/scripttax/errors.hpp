#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scripttax {

/// Base class for every error raised by the toolkit. `exit_code()` is the
/// process status the CLI reports for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 3; }
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message, std::size_t line = 0)
      : Error(line ? message + " (line " + std::to_string(line) + ")"
                   : message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  int exit_code() const noexcept override { return 1; }

 private:
  std::size_t line_;
};

/// Input parsed but violates a domain invariant or precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// An internal consistency check failed; indicates a bug, not bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace scripttax

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qeuclid {

// Base class for all errors raised by the kernel.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arithmetic domain violations: division by zero, evaluation at a pole.
struct ScalarError : Error {
  using Error::Error;
};

// Structurally valid input that the kernel deliberately does not handle
// (e.g. exterior derivative of an r-inverse).
struct UnsupportedInput : Error {
  using Error::Error;
};

// Bad run configuration (CLI contract: exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

// Expression-language errors; syntax errors carry the offending position.
struct ParseError : Error {
  std::size_t position = std::string::npos;
  explicit ParseError(const std::string& msg) : Error(msg) {}
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

}  // namespace qeuclid

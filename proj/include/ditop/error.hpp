#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ditop {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed PV source. Carries the 1-based position of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A model, path, map or query violates a structural precondition.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A desk-scale budget (path cap, bijection cap, search budget) was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Checked integer arithmetic overflowed.
class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace ditop

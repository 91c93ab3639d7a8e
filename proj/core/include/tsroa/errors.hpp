#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsroa {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DegreeOverflow : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class InvalidBox : public Error {
 public:
  using Error::Error;
};

class OutsideDomain : public Error {
 public:
  using Error::Error;
};

/// Raised by the eigen solver if the Jacobi sweep budget is exhausted.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// A modeling step that cannot be carried out on an otherwise valid input,
/// e.g. too many scheduling variables.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsroa

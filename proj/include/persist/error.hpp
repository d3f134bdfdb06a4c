#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace persist {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CFG document. Carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A structurally well-formed input that violates a semantic rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Failure inside an analysis run (unsupported input, iteration guard, ...).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// The instance is too large for an exhaustive procedure.
class BudgetExceeded : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

}  // namespace persist

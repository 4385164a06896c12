#pragma once

#include <stdexcept>
#include <string>

namespace semialg {

/// Raised on misuse of an API: mismatched universes, missing basis terms,
/// malformed inputs that are not source text.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the program and template parsers. Carries a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Raised when a relaxation cannot be sized for the requested degrees.
class SizingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised on invalid run configuration (flags, boxes, backends).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace semialg

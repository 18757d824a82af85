#ifndef MHOF_ERRORS_HPP
#define MHOF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mhof {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/point length disagreement.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced during evaluation; the message names the term.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed persisted data. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  explicit ParseError(const std::string& msg) : Error(msg), line_(0) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Persisted data is well-formed but inconsistent with its own metadata.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Out-of-order record appended to a trace.
class SequencingError : public Error {
 public:
  using Error::Error;
};

}  // namespace mhof

#endif  // MHOF_ERRORS_HPP

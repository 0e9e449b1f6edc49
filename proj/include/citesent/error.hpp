#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace citesent {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. The message always starts with "<source>:<line>: ".
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared while training (usually a learning-rate blowup).
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace citesent

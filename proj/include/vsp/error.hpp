#pragma once

#include <stdexcept>
#include <string>

namespace vsp {

// Base for every error the library raises on bad input or failed numerics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent flags or arguments supplied by the caller of a front end.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-contract data: parse failures, shape mismatches,
// probabilities outside [0, 1], and the like.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& where, long line, const std::string& what)
      : DataError(where + ":" + std::to_string(line) + ": " + what), line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

// A numerical procedure cannot produce a defined result (rank deficiency,
// degenerate moments, non-finite input).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace vsp

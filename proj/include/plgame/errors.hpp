#pragma once

#include <stdexcept>
#include <string>

namespace plgame {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function or gradient evaluation produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch, invalid constants, bad schedule, bad config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The operation needs data the problem does not provide (e.g. no oracle).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// An estimator found no admissible samples.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message names the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input/output failure on the run directory.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace plgame

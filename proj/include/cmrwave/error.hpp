#pragma once

#include <stdexcept>
#include <string>

namespace cmrwave {

/// Base of every error raised by the analysis library. The CLI maps all of
/// these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ingest
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A single CSV row could not be interpreted. `line()` is 1-based and counts
/// the header as line 1.
class RowError : public Error {
 public:
  RowError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SelectionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DataQualityError : public Error {
 public:
  using Error::Error;
};

// decompose
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

// prepare
class CalibrationError : public Error {
 public:
  using Error::Error;
};

class DegenerateScaleError : public Error {
 public:
  using Error::Error;
};

// aggregate / render
class SlicingError : public Error {
 public:
  using Error::Error;
};

class ComparisonError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmrwave

#pragma once

#include <stdexcept>
#include <string>

namespace citemix {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Correlation requested on a constant input; never silently reported as 0.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

// Target correlation above what the smallest admissible sigma attains
// (truncation ties cap the achievable rank correlation at low means).
class UnreachableTarget : public CalibrationError {
 public:
  UnreachableTarget(const std::string& msg, double attainable)
      : CalibrationError(msg), attainable_max(attainable) {}
  double attainable_max;
};

// Target correlation below what the largest admissible sigma attains.
class NonBracketing : public CalibrationError {
 public:
  NonBracketing(const std::string& msg, double attainable)
      : CalibrationError(msg), attainable_min(attainable) {}
  double attainable_min;
};

class InversionError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public InversionError {
 public:
  using InversionError::InversionError;
};

class NoConvergence : public InversionError {
 public:
  using InversionError::InversionError;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace citemix

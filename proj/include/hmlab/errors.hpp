#pragma once

#include <stdexcept>
#include <string>

namespace hmlab {

// Base for every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class PointOutsideDomain : public Error {
 public:
  using Error::Error;
};

class MassMismatch : public Error {
 public:
  using Error::Error;
};

class SizeCapExceeded : public Error {
 public:
  using Error::Error;
};

class UnsupportedDomain : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public Error {
 public:
  using Error::Error;
};

class CalibrationFailed : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace hmlab

#pragma once

#include <stdexcept>
#include <string>

namespace prdeep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid dimensions or vector lengths that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter value (negative sigma, zero mask count, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

}  // namespace prdeep

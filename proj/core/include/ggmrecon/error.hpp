#pragma once

#include <stdexcept>
#include <string>

namespace ggmrecon {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, index sets, dimensions).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Model or analysis parameters outside their admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The request is well-formed but there is nothing to compute, e.g. an
/// empty missing set.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A factorization or solve failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ggmrecon

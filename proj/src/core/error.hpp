#pragma once

#include <stdexcept>
#include <string>

namespace frictionlab {

// Base of every error raised by the core. The C API maps the concrete type to
// a status code, the CLI maps the status code to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unparsable config, violated precondition, bad geometry.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Iterative method exhausted its budget or produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Requested integral is infinite (e.g. the infrared integral at sigma = 0 for
// n = 3). Never returned as a number.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Fit-based classification could not single out a model.
class AmbiguousFitError : public Error {
 public:
  using Error::Error;
};

}  // namespace frictionlab

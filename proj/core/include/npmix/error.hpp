#pragma once

#include <stdexcept>
#include <string>

namespace npmix {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data: unparseable cells, unknown levels, dimension mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration or restriction.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The estimator cannot proceed: empty donor pools, vanishing weights,
// undefined functionals, too many failed bootstrap replicates.
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace npmix

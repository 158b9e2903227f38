#pragma once

#include <stdexcept>
#include <string>

namespace draf {

/// Malformed input data, bad file contents, or an invalid dataset shape.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value showed up during optimisation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace draf

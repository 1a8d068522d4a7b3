#pragma once

#include <stdexcept>
#include <string>

namespace e2dpca {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes or indices that do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Valid shapes, but the data itself cannot support the request
// (zero scatter, non-finite values, non-symmetric input).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace e2dpca

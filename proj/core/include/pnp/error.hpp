#pragma once

#include <stdexcept>
#include <string>

namespace pnp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A linear solve did not reach its tolerance or broke down.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Configuration document errors; the message carries the config path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pnp

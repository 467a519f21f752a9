#pragma once

#include <stdexcept>
#include <string>

namespace gradplay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A strategy profile or matrix does not conform to the game's dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument violates an operation's precondition.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A numerical computation became ill-conditioned (e.g. finite differences
/// leave the region where the quantity is defined).
class ConditioningError : public Error {
 public:
  using Error::Error;
};

}  // namespace gradplay

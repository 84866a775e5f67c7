// errors.hpp: Exception hierarchy shared by all bangbang modules

#pragma once

#include <stdexcept>
#include <string>

namespace bangbang {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  // Short class name used for CLI diagnostics and exit codes.
  virtual const char* kind() const noexcept { return "Error"; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "ValidationError"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "DomainError"; }
};

// Adaptive quadrature did not meet its tolerance within the subdivision budget.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}
  const char* kind() const noexcept override { return "QuadratureError"; }
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// The restoration equation has no solution in the search interval: exact
// unitarity cannot be restored at this pulse rate.
class NoRootInInterval : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "NoRootInInterval"; }
};

class NonConvergence : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "NonConvergence"; }
};

class NotStabilized : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "NotStabilized"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "IoError"; }
};

}  // namespace bangbang

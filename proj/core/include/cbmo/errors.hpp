#pragma once

#include <stdexcept>
#include <string>

namespace cbmo {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (bad domain, singular point,
/// exponent outside P, empty bank, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure ran out of budget. Carries the best estimate
/// reached so far together with its error estimate.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double partial, double error)
      : Error(what), partial_estimate_(partial), error_estimate_(error) {}

  double partial_estimate() const { return partial_estimate_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double partial_estimate_;
  double error_estimate_;
};

/// The modular stays infinite for every scale tried: f is not in L^{p(.)}.
class NotInSpace : public Error {
 public:
  using Error::Error;
};

}  // namespace cbmo

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace plap {

inline std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Base for failures of the numerics themselves (as opposed to invalid input,
// which is reported through std::invalid_argument / std::domain_error).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shot whose phase-plane distance to (1, 0) dropped below the configured
// floor; the phase is no longer resolvable at the working tolerance.
class NearConstantShotError : public NumericalError {
 public:
  NearConstantShotError(double r, double distance)
      : NumericalError("near-constant shot: phase-plane distance " +
                       format_g(distance) + " below floor at r = " +
                       format_g(r)),
        r_(r) {}
  double last_r() const noexcept { return r_; }

 private:
  double r_;
};

// Bracketing / bisection search that could not locate its target.
class SearchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// d = 1 is the constant solution; it has no phase.
class DegenerateShotError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace plap

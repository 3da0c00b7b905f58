#pragma once

// Generalized p-trigonometric functions.
//
// cos_p / sin_p are the solution (C, S) of the Hamiltonian system
//
//   C' = -phi_{p'}(S),   S' = phi_p(C),   C(0) = 1, S(0) = 0,
//
// which conserves (p-1)|S|^{p'} + |C|^p = 1, has half-period
// pi_p = 2 pi (p-1)^{1/p} / (p sin(pi/p)) and reduces to cos / sin at p = 2.
// It satisfies C(pi_p - t) = -C(t), S(pi_p - t) = S(t), and is
// anti-periodic with period pi_p.

#include <cmath>
#include <memory>
#include <utility>

#include "plap/odeint.hpp"

namespace plap {

// Exponent p > 1 with its conjugate p' = p / (p - 1).
class PExponent {
 public:
  explicit PExponent(double p);

  double p() const noexcept { return p_; }
  double conjugate() const noexcept { return pprime_; }

 private:
  double p_;
  double pprime_;
};

// |s|^{p-2} s, continuous at s = 0 for every p > 1.
template <typename Scalar>
inline Scalar phi_p(Scalar s, Scalar p) {
  if (s == Scalar(0)) return Scalar(0);
  return std::copysign(std::pow(std::abs(s), p - Scalar(1)), s);
}

// Inverse of phi_p, i.e. phi_{p'}.
template <typename Scalar>
inline Scalar phi_p_inv(Scalar s, Scalar p) {
  return phi_p(s, p / (p - Scalar(1)));
}

// Half-period of cos_p / sin_p; throws std::domain_error if p <= 1.
double pi_p(double p);

struct PTrigPair {
  double cos_p;
  double sin_p;
};

class PTrigContext {
 public:
  explicit PTrigContext(PExponent exponent);

  // Process-wide cache, one context per distinct p. Thread-safe.
  static std::shared_ptr<const PTrigContext> shared(double p);

  const PExponent& exponent() const noexcept { return exponent_; }
  double pi_p() const noexcept { return pi_p_; }
  // Bound on |(p-1)|S|^{p'} + |C|^p - 1| measured over the table at build time.
  double eval_tol() const noexcept { return eval_tol_; }

  // (cos_p, sin_p) at an arbitrary finite phase; std::domain_error otherwise.
  PTrigPair operator()(double theta) const;

  // Values on the quarter period [0, pi_p / 2].
  PTrigPair quarter(double t) const;

 private:
  using Table = ode::DenseSolution<double, 2>;

  PTrigPair series_low(double t) const;
  PTrigPair series_high(double tau) const;

  PExponent exponent_;
  double pi_p_;
  double s_max_;     // sin_p(pi_p / 2)
  double c_slope_;   // -cos_p'(pi_p / 2)
  double eval_tol_ = 0;
  // Forward table from the origin and backward table (in tau = pi_p/2 - t)
  // from the quarter point, both meeting at pi_p / 4.
  Table low_;
  Table high_;
};

PTrigPair ptrig_pair(double theta, const PTrigContext& ctx);

}  // namespace plap

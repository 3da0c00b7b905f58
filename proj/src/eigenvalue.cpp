#include "plap/eigenvalue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "plap/errors.hpp"
#include "plap/odeint.hpp"

namespace plap {

double eigen_angle(double lambda, const Geometry& geom, const SolverConfig& cfg) {
  if (!(lambda >= 0) || !std::isfinite(lambda))
    throw std::domain_error("eigen_angle requires lambda >= 0");
  geom.validate();
  const double p = geom.p();
  const double pp = geom.exponent.conjugate();
  const int dim = geom.dim;
  const auto ctx = PTrigContext::shared(p);
  const double pi = ctx->pi_p();
  if (lambda == 0.0) return pi;

  // State is the offset vartheta - pi_p, which keeps full relative
  // precision while the phase is still close to pi_p near the centre.
  ode::IvpSpec<double, 1> ivp;
  const double r_outer = geom.outer_radius();
  if (geom.is_ball()) {
    const double eps0 = cfg.eps0_for(r_outer);
    ivp.r_start = eps0;
    ivp.y0(0) = lambda * std::pow(eps0, dim) / dim;
  } else {
    ivp.r_start = geom.inner_radius();
    ivp.y0(0) = 0.0;
  }
  ivp.r_end = r_outer;
  // The end phase crosses k pi_p at a rate of order lambda, so its error is
  // amplified well beyond the local tolerance; run this scalar equation at
  // the tightest tolerance the integrator accepts.
  ivp.rel_tol = std::max(1e-14, 1e-4 * cfg.rel_tol);
  ivp.abs_tol = std::max(1e-14, 1e-4 * cfg.abs_tol);
  ivp.max_steps = cfg.max_steps;

  const double damp = double(dim - 1) / p;
  const PTrigContext& trig = *ctx;
  ivp.rhs = [=, &trig](double r, const Eigen::Matrix<double, 1, 1>& y) {
    // |cos_p|, |sin_p| are unchanged by the pi_p shift.
    const PTrigPair cs = trig(y(0));
    const double rn1 = dim == 1 ? 1.0 : std::pow(r, dim - 1);
    // |S|^{p'} r^{(N-1)(1-p')} = (|S| r^{-(N-1)/p})^{p'}
    const double scaled = dim == 1 ? std::abs(cs.sin_p) : std::abs(cs.sin_p) / std::pow(r, damp);
    Eigen::Matrix<double, 1, 1> out;
    out(0) = (p - 1.0) * std::pow(scaled, pp) + lambda * rn1 * std::pow(std::abs(cs.cos_p), p);
    return out;
  };
  const auto sol = ode::integrate(ivp);
  return pi + sol.back()(0);
}

EigenResult eigenvalue(int k, const Geometry& geom, const SolverConfig& cfg) {
  if (k < 1) throw std::domain_error("eigenvalue index k must be >= 1");
  const double pi = pi_p(geom.p());
  EigenResult res;
  res.k = k;
  if (k == 1) {
    res.lambda = 0.0;
    res.angle_residual = std::abs(eigen_angle(0.0, geom, cfg) - pi);
    return res;
  }
  const double target = k * pi;
  const double scale = std::pow(geom.outer_radius(), -geom.p());
  const double cap = cfg.lambda_max * scale;

  double lo = 0.0;
  double hi = scale;
  while (eigen_angle(hi, geom, cfg) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap)
      throw SearchError("eigenvalue bracket for k = " + std::to_string(k) +
                        " not found below lambda_max = " + format_g(cap));
  }
  // Bisection stops on the lambda tolerance once an endpoint also meets the
  // angle tolerance; near k pi_p the angle is steep in lambda.
  const double angle_tol = 0.5e-8 * pi;
  double r_lo = INFINITY, r_hi = std::abs(eigen_angle(hi, geom, cfg) - target);
  if (lo > 0) r_lo = std::abs(eigen_angle(lo, geom, cfg) - target);
  for (int it = 0; it < cfg.lambda_max_iter; ++it) {
    if (hi - lo <= cfg.lambda_rel_tol * hi && std::min(r_lo, r_hi) <= angle_tol) break;
    const double mid = 0.5 * (lo + hi);
    const double a = eigen_angle(mid, geom, cfg);
    if (a < target) {
      lo = mid;
      r_lo = target - a;
    } else {
      hi = mid;
      r_hi = a - target;
    }
  }
  res.lambda = r_lo < r_hi ? lo : hi;
  res.angle_residual = std::min(r_lo, r_hi);
  return res;
}

Eigenfunction eigenfunction(double lambda, const Geometry& geom, const SolverConfig& cfg) {
  if (!(lambda >= 0)) throw std::domain_error("eigenfunction requires lambda >= 0");
  geom.validate();
  const double p = geom.p();
  const double pp = geom.exponent.conjugate();
  const int dim = geom.dim;

  ode::IvpSpec<double, 2> ivp;
  const double r_outer = geom.outer_radius();
  if (geom.is_ball()) {
    const double eps0 = cfg.eps0_for(r_outer);
    ivp.r_start = eps0;
    ivp.y0 = Eigen::Vector2d(-1.0 + phi_p(lambda / dim, pp) * std::pow(eps0, pp) / pp,
                             lambda * std::pow(eps0, dim) / dim);
  } else {
    ivp.r_start = geom.inner_radius();
    ivp.y0 = Eigen::Vector2d(-1.0, 0.0);
  }
  ivp.r_end = r_outer;
  ivp.rel_tol = cfg.rel_tol;
  ivp.abs_tol = cfg.abs_tol;
  ivp.max_steps = cfg.max_steps;
  ivp.rhs = [=](double r, const Eigen::Vector2d& y) {
    const double rn1 = dim == 1 ? 1.0 : std::pow(r, dim - 1);
    return Eigen::Vector2d(phi_p(y(1) / rn1, pp), -lambda * rn1 * phi_p(y(0), p));
  };
  const auto sol = ode::integrate(ivp);

  Eigenfunction ef;
  const auto n = Eigen::Index(sol.size());
  ef.r.resize(n);
  ef.phi.resize(n);
  ef.psi.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ef.r(i) = sol.nodes()[std::size_t(i)];
    ef.phi(i) = sol.states()[std::size_t(i)](0);
    ef.psi(i) = sol.states()[std::size_t(i)](1);
  }
  return ef;
}

}  // namespace plap

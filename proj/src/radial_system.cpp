#include "plap/radial_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "plap/errors.hpp"
#include "plap/odeint.hpp"

namespace plap {

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (d_grid_size < 2) fail("d_grid_size must be >= 2");
  if (!(0 < d_min && d_min < d_max)) fail("scan bounds must satisfy 0 < d_min < d_max");
  if (!(d_max < 1.0)) fail("d_max must be < 1");
  if (!(1.0 < d_upper_min && d_upper_min < d_upper_max))
    fail("upper scan bounds must satisfy 1 < d_upper_min < d_upper_max");
  if (!(refine_near_one >= 0 && refine_near_one <= 1))
    fail("refine_near_one must lie in [0, 1]");
  if (!(bisect_tol_d > 0 && bisect_tol_d < (d_max - d_min) / d_grid_size))
    fail("bisect_tol_d must satisfy 0 < bisect_tol_d < (d_max - d_min) / d_grid_size");
  if (!(residual_tol > 0)) fail("residual_tol must be positive");
  if (eps0 && !(*eps0 > 0)) fail("eps0 must be positive");
  if (!(rho_floor >= 0)) fail("rho_floor must be non-negative");
  if (!(phase_tol_rel > 0)) fail("phase_tol_rel must be positive");
  auto tol_ok = [](double t) { return t >= 1e-14 && t <= 1e-2; };
  if (!tol_ok(rel_tol) || !tol_ok(abs_tol))
    fail("integrator tolerances must lie in [1e-14, 1e-2]");
  if (max_steps == 0) fail("max_steps must be positive");
  if (!(lambda_max > 1)) fail("lambda_max must exceed 1");
  if (!(lambda_rel_tol > 0)) fail("lambda_rel_tol must be positive");
  if (lambda_max_iter < 1) fail("lambda_max_iter must be positive");
  if (!(r_cap > 0)) fail("r_cap must be positive");
}

// --- Nonlinearity -----------------------------------------------------------

Nonlinearity::Nonlinearity(Kind kind, double q, double r, double p)
    : kind_(kind), q_(q), r_(r), p_(p) {
  // Near s = 1, g(s) - s^{p-1} ~ (q - r)(s - 1); dividing by phi_p(s - 1)
  // leaves (q - r)|s - 1|^{2-p}.
  const double slope = q_ - r_;
  if (p_ > 2.0)
    c1_ = std::numeric_limits<double>::infinity();
  else if (p_ == 2.0)
    c1_ = slope;
  else
    c1_ = 0.0;
  check_sign_condition();
}

Nonlinearity Nonlinearity::pure_power(double q, const PExponent& p) {
  if (!std::isfinite(q) || !(q > p.p()))
    throw std::domain_error("pure power requires q > p (q = " + std::to_string(q) +
                            ", p = " + std::to_string(p.p()) + ")");
  return Nonlinearity(Kind::PurePower, q, p.p(), p.p());
}

Nonlinearity Nonlinearity::power_combo(double q, double r, const PExponent& p) {
  if (!std::isfinite(q) || !std::isfinite(r) || !(p.p() <= r && r < q))
    throw std::domain_error("power combination requires p <= r < q");
  return Nonlinearity(Kind::PowerCombo, q, r, p.p());
}

double Nonlinearity::g(double s) const {
  if (s <= 0) return 0.0;
  double value = std::pow(s, q_ - 1.0);
  if (kind_ == Kind::PowerCombo) value += std::pow(s, p_ - 1.0) - std::pow(s, r_ - 1.0);
  return value;
}

double Nonlinearity::f(double s) const {
  if (s <= 0) return 0.0;
  // s^{q-1} - s^{r-1} for both families (r = p for the pure power).
  return std::pow(s, q_ - 1.0) - std::pow(s, r_ - 1.0);
}

void Nonlinearity::check_sign_condition() const {
  for (int i = 1; i < 200; ++i) {
    const double s = 0.01 * i;
    // f avoids the cancellation in g(s) - s^{p-1} when r is close to q.
    const double fs = f(s);
    const bool ok = s < 1.0 ? fs < 0 : (s == 1.0 ? std::abs(fs) < 1e-12 : fs > 0);
    if (!ok)
      throw std::domain_error("nonlinearity violates g(s) - s^{p-1} sign condition at s = " +
                              std::to_string(s));
  }
}

// --- Geometry ---------------------------------------------------------------

void Geometry::validate() const {
  if (dim < 1) throw std::domain_error("dimension N must be >= 1");
  if (const auto* b = std::get_if<Ball>(&domain)) {
    if (!std::isfinite(b->radius) || !(b->radius > 0))
      throw std::domain_error("ball radius must be positive");
  } else {
    const auto& a = std::get<Annulus>(domain);
    if (!std::isfinite(a.outer) || !(0 < a.inner && a.inner < a.outer))
      throw std::domain_error("annulus radii must satisfy 0 < R1 < R2");
  }
}

double Geometry::outer_radius() const {
  if (const auto* b = std::get_if<Ball>(&domain)) return b->radius;
  return std::get<Annulus>(domain).outer;
}

double Geometry::inner_radius() const {
  if (std::holds_alternative<Ball>(domain)) return 0.0;
  return std::get<Annulus>(domain).inner;
}

Geometry Geometry::with_outer_radius(double radius) const {
  Geometry out = *this;
  if (std::holds_alternative<Ball>(domain)) {
    out.domain = Ball{radius};
  } else {
    const auto& a = std::get<Annulus>(domain);
    out.domain = Annulus{a.inner * radius / a.outer, radius};
  }
  out.validate();
  return out;
}

void ProblemSpec::validate() const {
  Geometry::validate();
  if (g.p() != exponent.p())
    throw std::invalid_argument("nonlinearity was built for a different p");
}

// --- Shooting ---------------------------------------------------------------

double f_eval(double s, const ProblemSpec& spec) { return spec.g.f(s); }

StartupState startup_state(double d, double eps0, const ProblemSpec& spec) {
  if (!(d >= 0)) throw std::domain_error("shooting value d must be >= 0");
  if (d == 1.0) throw DegenerateShotError("d = 1 is the constant solution (rho = 0)");
  const double radius = spec.outer_radius();
  if (!(eps0 > 0 && eps0 <= 1e-4 * radius))
    throw std::domain_error("eps0 must lie in (0, 1e-4 R]");

  const double p = spec.exponent.p();
  const double pp = spec.exponent.conjugate();
  const double n = spec.dim;
  const double pi = pi_p(p);
  const double fd = spec.g.f(d);
  const double rn = std::pow(eps0, n);

  StartupState s;
  s.v = -fd * rn / n;
  s.u = d - phi_p(fd / n, pp) * std::pow(eps0, pp) / pp;
  if (d < 1.0)
    s.theta = pi - fd * rn / (n * std::pow(1.0 - d, p - 1.0));
  else
    s.theta = fd * rn / (n * std::pow(d - 1.0, p - 1.0));
  return s;
}

Shot shoot(double d, const ProblemSpec& spec, const SolverConfig& cfg) {
  const double p = spec.exponent.p();
  const double pp = spec.exponent.conjugate();
  const double pi = pi_p(p);
  const int dim = spec.dim;
  const double r_outer = spec.outer_radius();

  ode::IvpSpec<double, 3> ivp;
  auto g_of = [&](double s) { return spec.g.f(s); };
  if (spec.is_ball()) {
    // The series is only meaningful while its increments in u and theta are
    // small; steep nonlinearities need a start radius below the default.
    double eps0 = cfg.eps0_for(r_outer);
    const double fd = std::abs(g_of(d));
    if (fd > 0) {
      const double gap = std::abs(1.0 - d);
      const double log_u = (std::log(1e-6 * gap * pp) - (pp - 1.0) * std::log(fd / dim)) / pp;
      const double log_th = (std::log(1e-6 * dim) + (p - 1.0) * std::log(gap) - std::log(fd)) / dim;
      eps0 = std::min(eps0, std::exp(std::min(log_u, log_th)));
    }
    if (!(eps0 > 0)) throw NumericalError("startup radius underflows for d = " + format_g(d));
    const StartupState s0 = startup_state(d, eps0, spec);
    ivp.r_start = eps0;
    ivp.y0 = Eigen::Vector3d(s0.u, s0.v, s0.theta);
  } else {
    if (!(d > 0)) throw std::domain_error("annulus shots require d > 0");
    if (d == 1.0) throw DegenerateShotError("d = 1 is the constant solution (rho = 0)");
    ivp.r_start = spec.inner_radius();
    ivp.y0 = Eigen::Vector3d(d, 0.0, d < 1.0 ? pi : 0.0);
  }
  ivp.r_end = r_outer;
  ivp.rel_tol = cfg.rel_tol;
  ivp.abs_tol = cfg.abs_tol;
  ivp.max_steps = cfg.max_steps;

  const Nonlinearity& g = spec.g;
  const double rho_sq_floor = std::pow(cfg.rho_floor, p);
  ivp.rhs = [=, &g](double r, const Eigen::Vector3d& y) {
    const double u = y(0), v = y(1);
    const double rn1 = dim == 1 ? 1.0 : std::pow(r, dim - 1);
    const double fu = g.f(u);
    const double du = phi_p(v / rn1, pp);
    const double x = u - 1.0;
    const double rho_sq = std::pow(std::abs(x), p) + (p - 1.0) * std::pow(std::abs(v), pp);
    if (rho_sq < rho_sq_floor) throw NearConstantShotError(r, std::pow(rho_sq, 1.0 / p));
    // theta' = [(p-1) v u' + (u-1) r^{N-1} f(u)] / rho^2, the Cartesian form
    // of r^{N-1}[(p-1)|sin_p|^{p'} / r^{(N-1)p'} + (u-1) f(u) / rho^2].
    const double dtheta = ((p - 1.0) * v * du + x * rn1 * fu) / rho_sq;
    return Eigen::Vector3d(du, -rn1 * fu, dtheta);
  };

  const auto sol = ode::integrate(ivp);

  Shot shot;
  Trajectory& t = shot.trajectory;
  const auto n = Eigen::Index(sol.size());
  t.r.resize(n);
  t.u.resize(n);
  t.v.resize(n);
  t.theta.resize(n);
  t.rho_sq.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& y = sol.states()[std::size_t(i)];
    t.r(i) = sol.nodes()[std::size_t(i)];
    t.u(i) = y(0);
    t.v(i) = y(1);
    t.theta(i) = y(2);
    t.rho_sq(i) = std::pow(std::abs(y(0) - 1.0), p) + (p - 1.0) * std::pow(std::abs(y(1)), pp);
  }

  ShotSummary& s = shot.summary;
  s.d = d;
  s.theta_start = t.theta(0);
  s.theta_end = t.theta(n - 1);
  s.u_end = t.u(n - 1);
  s.v_end = t.v(n - 1);
  s.min_u = t.u.minCoeff();
  s.max_u = t.u.maxCoeff();
  s.max_abs_v = t.v.cwiseAbs().maxCoeff();

  s.zeros = zeros_from_phase(t, pi);
  return shot;
}

int zeros_from_phase(const Trajectory& t, double pi) {
  int zeros = 0;
  for (Eigen::Index i = 0; i + 1 < t.size(); ++i) {
    const double a = t.theta(i) / pi - 0.5;
    const double b = t.theta(i + 1) / pi - 0.5;
    // Levels L with a < L <= b.
    zeros += int(std::floor(b) - std::floor(a));
  }
  return zeros;
}

}  // namespace plap

#pragma once

// Radial Neumann problem  -(r^{N-1} phi_p(u'))' = r^{N-1} f(u)  and its
// shooting system in (u, v = r^{N-1} phi_p(u')), augmented with the p-polar
// phase about the constant solution (1, 0):
//
//   u - 1 = rho^{2/p} cos_p(theta),   v = -rho^{2/p'} sin_p(theta).

#include <variant>

#include <Eigen/Core>

#include "plap/config.hpp"
#include "plap/ptrig.hpp"

namespace plap {

// g(s) = s^{q-1}  or  g(s) = s^{q-1} + s^{p-1} - s^{r-1}.
class Nonlinearity {
 public:
  enum class Kind { PurePower, PowerCombo };

  // Requires q > p.
  static Nonlinearity pure_power(double q, const PExponent& p);
  // Requires p <= r < q.
  static Nonlinearity power_combo(double q, double r, const PExponent& p);

  Kind kind() const noexcept { return kind_; }
  double q() const noexcept { return q_; }
  double r_exp() const noexcept { return r_; }
  double p() const noexcept { return p_; }
  // lim_{s->1} (g(s) - s^{p-1}) / phi_p(s - 1); +infinity when p > 2.
  double c1() const noexcept { return c1_; }

  double g(double s) const;
  // g(s) - s^{p-1} for s >= 0, zero for s < 0.
  double f(double s) const;

 private:
  Nonlinearity(Kind kind, double q, double r, double p);
  void check_sign_condition() const;

  Kind kind_;
  double q_;
  double r_;
  double p_;
  double c1_;
};

struct Ball {
  double radius;
};

struct Annulus {
  double inner;
  double outer;
};

using Domain = std::variant<Ball, Annulus>;

struct Geometry {
  PExponent exponent;
  int dim;
  Domain domain;

  void validate() const;
  double p() const noexcept { return exponent.p(); }
  double outer_radius() const;
  // 0 for a ball.
  double inner_radius() const;
  bool is_ball() const noexcept { return std::holds_alternative<Ball>(domain); }
  // Same geometry with the outer radius replaced (annulus keeps R1/R2).
  Geometry with_outer_radius(double radius) const;
};

struct ProblemSpec : Geometry {
  Nonlinearity g;

  ProblemSpec(PExponent exponent, int dim, Domain domain, Nonlinearity nonlinearity)
      : Geometry{exponent, dim, domain}, g(nonlinearity) {
    validate();
  }
  ProblemSpec(const Geometry& geometry, Nonlinearity nonlinearity)
      : Geometry(geometry), g(nonlinearity) {
    validate();
  }

  ProblemSpec with_outer_radius(double radius) const {
    return ProblemSpec(Geometry::with_outer_radius(radius), g);
  }
  ProblemSpec with_nonlinearity(Nonlinearity nonlinearity) const {
    return ProblemSpec(static_cast<const Geometry&>(*this), nonlinearity);
  }

  // Geometry checks plus agreement of the nonlinearity's p.
  void validate() const;
};

// Sampled path of one shot.
struct Trajectory {
  Eigen::VectorXd r;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  Eigen::VectorXd theta;
  Eigen::VectorXd rho_sq;

  Eigen::Index size() const { return r.size(); }
};

struct ShotSummary {
  double d = 0;
  double theta_start = 0;
  double theta_end = 0;
  double v_end = 0;
  double u_end = 0;
  int zeros = 0;  // zeros of u - 1 in the interior
  double min_u = 0;
  double max_u = 0;
  double max_abs_v = 0;
};

struct Shot {
  Trajectory trajectory;
  ShotSummary summary;
};

struct StartupState {
  double u;
  double v;
  double theta;
};

double f_eval(double s, const ProblemSpec& spec);

// Series values of (u, v, theta) at r = eps0 for a ball shot from u(0) = d.
StartupState startup_state(double d, double eps0, const ProblemSpec& spec);

// Integrates (u, v, theta) from the centre (or inner radius) to the outer
// radius. rho^2 = |u-1|^p + (p-1)|v|^{p'} is computed algebraically.
Shot shoot(double d, const ProblemSpec& spec, const SolverConfig& cfg);

// Interior zeros of u - 1 counted from the phase: number of upward crossings
// of theta through the levels (j + 1/2) pi_p.
int zeros_from_phase(const Trajectory& t, double pi_p);

}  // namespace plap

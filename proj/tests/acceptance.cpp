// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gen.hpp"
#include "oracles.hpp"
#include "plap/branch.hpp"
#include "plap/eigenvalue.hpp"
#include "plap/errors.hpp"
#include "plap/odeint.hpp"
#include "plap/solver.hpp"

using namespace plap;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << "[failed: " << what << "] ";
    }
  }
};

ProblemSpec ball(double p, int n, double radius, double q) {
  const PExponent e(p);
  return ProblemSpec(e, n, Ball{radius}, Nonlinearity::pure_power(q, e));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int sign_changes(const Trajectory& t) {
  int count = 0, last = 0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double x = t.u(i) - 1.0;
    const int s = x > 0 ? 1 : (x < 0 ? -1 : 0);
    if (s != 0 && last != 0 && s != last) ++count;
    if (s != 0) last = s;
  }
  return count;
}

// Worst relative mismatch between the stored rho^2 and both the algebraic
// formula and the p-polar reconstruction of (u, v); also whether theta is
// nondecreasing.
struct TrajectoryCheck {
  double rho_defect = 0;
  bool theta_monotone = true;
};

TrajectoryCheck check_trajectory(const Trajectory& t, double p) {
  const double pp = p / (p - 1);
  const auto ctx = PTrigContext::shared(p);
  TrajectoryCheck c;
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    const double algebraic = std::pow(std::abs(t.u(k) - 1), p) + (p - 1) * std::pow(std::abs(t.v(k)), pp);
    c.rho_defect = std::max(c.rho_defect, std::abs(t.rho_sq(k) - algebraic) / algebraic);
    const PTrigPair cs = (*ctx)(t.theta(k));
    const double rho = std::sqrt(t.rho_sq(k));
    const double um1 = std::pow(rho, 2 / p) * cs.cos_p;
    const double v = -std::pow(rho, 2 / pp) * cs.sin_p;
    const double scale = std::max(std::abs(t.u(k) - 1), std::abs(t.v(k)));
    c.rho_defect = std::max(c.rho_defect, std::max(std::abs(um1 - (t.u(k) - 1)), std::abs(v - t.v(k))) / scale);
    if (k && t.theta(k) < t.theta(k - 1)) c.theta_monotone = false;
  }
  return c;
}

// 1. pi_p and the p-trigonometric functions.
void criterion1(Outcome& o) {
  const double e2 = std::abs(pi_p(2.0) - pi);
  o.require(e2 <= 1e-12, "pi_2 = pi");
  double worst_identity = 0, worst_half = 0;
  for (double p : {1.3, 1.5, 1.8, 2.0, 2.1, 3.0, 4.0}) {
    const auto ctx = PTrigContext::shared(p);
    const double pp = p / (p - 1);
    for (int i = 0; i < 10000; ++i) {
      const PTrigPair cs = (*ctx)(2 * ctx->pi_p() * i / 9999.0);
      worst_identity = std::max(
          worst_identity,
          std::abs((p - 1) * std::pow(std::abs(cs.sin_p), pp) + std::pow(std::abs(cs.cos_p), p) - 1));
    }
    // Half period from the quarter-period integral, and from the first
    // downward zero of sin_p along the integrated defining system.
    worst_half = std::max(worst_half, std::abs(test::pi_p_quadrature(p) - pi_p(p)));
    ode::IvpSpec<double, 2> ivp;
    ivp.r_start = 0;
    ivp.r_end = 4.0;
    ivp.y0 = Eigen::Vector2d(1.0, 0.0);
    ivp.rel_tol = 1e-13;
    ivp.abs_tol = 1e-14;
    ivp.rhs = [p, pp](double, const Eigen::Vector2d& y) {
      return Eigen::Vector2d(-phi_p(y(1), pp), phi_p(y(0), p));
    };
    const auto sol = ode::integrate(ivp);
    double half = NAN;
    for (const auto& h : ode::crossings(sol, 1, std::vector<double>{0.0}, 1e-14))
      if (h.direction < 0) {
        half = h.r;
        break;
      }
    worst_half = std::max(worst_half, std::abs(half - pi_p(p)));
  }
  o.require(worst_identity <= 1e-9, "identity");
  o.require(worst_half <= 1e-10, "half period");
  o.note << "|pi_2 - pi| = " << e2 << ", identity defect = " << worst_identity
         << ", half-period error = " << worst_half;
}

// 2. Radial eigenvalues.
void criterion2(Outcome& o) {
  const SolverConfig cfg;
  double worst_oracle = 0;
  bool zero_first = true;
  for (double p : {1.5, 2.0, 3.0})
    for (double radius : {1.0, 2.0})
      for (int k = 1; k <= 6; ++k) {
        const double l = eigenvalue(k, Geometry{PExponent(p), 1, Ball{radius}}, cfg).lambda;
        if (k == 1)
          zero_first = zero_first && l == 0.0;
        else
          worst_oracle = std::max(worst_oracle, rel(l, std::pow((k - 1) * pi_p(p) / radius, p)));
      }
  double worst_scaling = 0;
  bool increasing = true;
  for (double p : {1.5, 2.0, 3.0})
    for (int n : {2, 3}) {
      double prev = -1;
      for (int k = 1; k <= 5; ++k) {
        const double ref = eigenvalue(k, Geometry{PExponent(p), n, Ball{1.0}}, cfg).lambda;
        increasing = increasing && ref > prev;
        prev = ref;
        if (k == 1 || k > 4) continue;
        for (double radius : {0.5, 2.0}) {
          const double l = eigenvalue(k, Geometry{PExponent(p), n, Ball{radius}}, cfg).lambda;
          worst_scaling = std::max(worst_scaling, rel(l * std::pow(radius, p), ref));
        }
      }
    }
  o.require(worst_oracle <= 1e-6, "1-D oracle");
  o.require(zero_first, "lambda_1 = 0");
  o.require(worst_scaling <= 1e-6, "scaling");
  o.require(increasing, "increasing in k");
  o.note << "1-D oracle rel err = " << worst_oracle << ", scaling rel err = " << worst_scaling;
}

// 3. Bifurcation onsets for p = 2.
void criterion3(Outcome& o) {
  const SolverConfig cfg;
  const auto tmpl = ball(2, 1, 1, 3);
  for (int j = 1; j <= 2; ++j) {
    const double analytic = 2 + j * j * pi * pi;
    const double from_eigen = 2 + eigenvalue(j + 1, tmpl, cfg).lambda;
    const double q = bifurcation_onset(tmpl, j, cfg, 3, 2 * analytic);
    o.require(rel(q, analytic) <= 1e-2, "onset vs 2 + (j pi)^2");
    o.require(rel(q, from_eigen) <= 1e-2, "onset vs eigen module");
    o.note << "q*(" << j << ") = " << q << " (2 + lambda = " << from_eigen << ") ";
  }
}

// 4. Three oscillating solutions at q = 100.
void criterion4(Outcome& o) {
  const SolverConfig cfg;
  const auto spec = ball(2, 1, 1, 100);
  const SolutionSet set = find_solutions(spec, cfg, 3);
  for (int j = 1; j <= 3; ++j) {
    const auto it = std::find_if(set.records.begin(), set.records.end(),
                                 [j](const SolutionRecord& r) { return r.j == j && r.side == Side::Lower; });
    if (it == set.records.end()) {
      o.require(false, "solution with j = " + std::to_string(j));
      continue;
    }
    const Trajectory& t = it->profile;
    const double max_v = t.v.cwiseAbs().maxCoeff();
    o.require(std::abs(it->v_end) <= 1e-7 * max_v, "|v(R)| for j = " + std::to_string(j));
    o.require(t.u.minCoeff() > 0, "min u > 0 for j = " + std::to_string(j));
    o.require(sign_changes(t) == j, "zero count for j = " + std::to_string(j));
    if (j == 1) {
      bool nondecreasing = true;
      for (Eigen::Index i = 1; i < t.size(); ++i) nondecreasing = nondecreasing && t.u(i) >= t.u(i - 1);
      o.require(nondecreasing, "j = 1 nondecreasing");
    }
    o.note << "d" << j << " = " << it->d_root << " ";
  }
  std::size_t lower = 0;
  for (const auto& r : set.records) lower += r.side == Side::Lower;
  o.require(lower >= 3, "at least 3 lower records");
}

// 5. Comparison with the eigen phase.
void criterion5(Outcome& o) {
  const SolverConfig cfg;
  const auto spec = ball(2, 1, 1, 100);
  const double lambda3 = eigenvalue(3, spec, cfg).lambda;
  o.require(spec.g.c1() > lambda3, "q - 2 > lambda_3");
  const double vartheta = eigen_angle(lambda3, spec, cfg);
  const double theta = shoot(1 - 1e-5, spec, cfg).summary.theta_end;
  o.require(std::abs(vartheta - 3 * pi) <= 1e-8 * pi, "vartheta_{lambda_3}(R) = 3 pi");
  o.require(theta > 3 * pi, "Theta > 3 pi");
  o.require(theta > vartheta, "Theta > vartheta");
  o.note << "Theta(1 - 1e-5) = " << theta << " vs vartheta = " << vartheta;
}

// 6. p = 3, q = 4.
void criterion6(Outcome& o) {
  const SolverConfig cfg;
  const auto spec = ball(3, 1, 1, 4);
  const double m = max_scan_phase(spec, cfg);
  o.require(m > 4 * pi_p(3.0), "max Theta > 4 pi_3");
  const SolutionSet set = find_solutions(spec, cfg, 3);
  for (int j = 1; j <= 3; ++j)
    o.require(std::any_of(set.records.begin(), set.records.end(), [j](const SolutionRecord& r) { return r.j == j; }),
              "solution with j = " + std::to_string(j));
  o.note << "max Theta / pi_3 = " << m / pi_p(3.0) << ", records = " << set.records.size();
}

// 7. p = 1.8, q = 3.
void criterion7(Outcome& o) {
  const SolverConfig cfg;
  const double pi18 = pi_p(1.8);
  const auto tmpl = ball(1.8, 1, 1, 3);
  const double near_one = shoot(1 - 1e-6, tmpl, cfg).summary.theta_end;
  o.require(near_one < pi18 + 0.1, "Theta(1 - 1e-6) < pi_p + 0.1");
  const RstarResult rs = rstar(tmpl, cfg, 1);
  o.require(std::isfinite(rs.rstar), "rstar finite");
  const SolutionSet pair = find_solutions(tmpl.with_outer_radius(2 * rs.rstar), cfg, 1);
  std::vector<double> ds;
  for (const auto& r : pair.records)
    if (r.j == 1 && r.side == Side::Lower) ds.push_back(r.d_root);
  const bool distinct = ds.size() >= 2 && ds.back() - ds.front() > 1e-6;
  o.require(distinct, "two distinct j = 1 solutions at 2 rstar");
  const double below = max_scan_phase(tmpl.with_outer_radius(0.5 * rs.rstar), cfg);
  o.require(below <= 2 * pi18, "max Theta <= 2 pi_p at rstar / 2");
  o.note << "Theta(1 - 1e-6) - pi_p = " << near_one - pi18 << ", rstar = " << rs.rstar << ", pair = {";
  for (double d : ds) o.note << d << " ";
  o.note << "}, max Theta / pi_p at rstar/2 = " << below / pi18;
}

// 8. Robustness under a smaller start radius and tighter tolerances.
void criterion8(Outcome& o) {
  SolverConfig base;
  base.eps0 = 1e-8;
  SolverConfig fine = base;
  fine.eps0 = 0.5e-8;
  fine.rel_tol = base.rel_tol / 10;
  fine.abs_tol = base.abs_tol / 10;

  double worst_d = 0;
  bool same_count = true;
  for (const auto& spec : {ball(2, 1, 1, 100), ball(3, 1, 1, 4), ball(1.8, 1, 7, 3)}) {
    const auto a = find_solutions(spec, base, 3);
    const auto b = find_solutions(spec, fine, 3);
    same_count = same_count && a.records.size() == b.records.size();
    for (std::size_t i = 0; i < std::min(a.records.size(), b.records.size()); ++i)
      worst_d = std::max(worst_d, std::abs(a.records[i].d_root - b.records[i].d_root));
  }
  o.require(same_count, "same number of roots");
  o.require(worst_d <= 1e-8, "d_root shift");

  double worst_lambda = 0;
  for (double p : {1.5, 2.0, 3.0})
    for (int n : {1, 2, 3})
      for (int k = 2; k <= 4; ++k) {
        const Geometry g{PExponent(p), n, Ball{1.0}};
        worst_lambda = std::max(worst_lambda, rel(eigenvalue(k, g, fine).lambda, eigenvalue(k, g, base).lambda));
      }
  o.require(worst_lambda <= 1e-8, "lambda shift");

  test::Gen gen(8);
  double worst_rho = 0;
  bool monotone = true;
  int shots = 0;
  const SolverConfig cfg;
  const double ps[] = {1.5, 1.8, 2.0, 2.5, 3.0};
  for (int i = 0; i < 150; ++i) {
    const double p = gen.pick(ps);
    const auto spec = ball(p, gen.integer(1, 3), gen.uniform(0.5, 3), p + gen.uniform(0.5, 30));
    const double d = gen.integer(0, 3) ? gen.uniform(1e-3, 1 - 1e-3) : gen.uniform(1 + 1e-3, 2);
    try {
      const TrajectoryCheck c = check_trajectory(shoot(d, spec, cfg).trajectory, p);
      worst_rho = std::max(worst_rho, c.rho_defect);
      monotone = monotone && c.theta_monotone;
      ++shots;
    } catch (const NumericalError&) {
    }
  }
  o.require(shots >= 100, "enough successful shots");
  o.require(worst_rho <= 1e-6, "rho consistency");
  o.require(monotone, "theta nondecreasing");
  o.note << "max |d shift| = " << worst_d << ", max lambda rel shift = " << worst_lambda
         << ", rho defect = " << worst_rho << " over " << shots << " shots";
}

// 9. Annulus path.
void criterion9(Outcome& o) {
  const SolverConfig cfg;
  const PExponent e(1.8);
  const ProblemSpec ann(e, 2, Annulus{0.4, 3.0}, Nonlinearity::pure_power(3, e));
  for (double d : {0.3, 0.8, 1.4}) {
    const Shot s = shoot(d, ann, cfg);
    const Trajectory& t = s.trajectory;
    o.require(t.r(0) == 0.4 && t.u(0) == d && t.v(0) == 0.0, "regular start at R1");
    o.require(t.theta(0) == (d < 1 ? pi_p(1.8) : 0.0), "start phase");
    o.require(t.r(t.size() - 1) == 3.0, "reaches R2");
    o.require(check_trajectory(t, 1.8).rho_defect <= 1e-6, "annulus rho consistency");
  }
  const auto tmpl = ball(1.8, 1, 1, 3);
  const RstarResult rs = rstar(tmpl, cfg, 1, 0.1);
  o.require(std::isfinite(rs.rstar) && rs.rstar > 0, "finite threshold");
  const double target = 2 * pi_p(1.8);
  const double lo = max_scan_phase(rstar_problem(tmpl, rs.rstar * (1 - 1e-3), 0.1), cfg);
  const double hi = max_scan_phase(rstar_problem(tmpl, rs.rstar * (1 + 1e-3), 0.1), cfg);
  o.require(lo <= target, "predicate false below");
  o.require(hi > target, "predicate true above");
  o.note << "annulus rstar(eps = 0.1) = " << rs.rstar << ", max Theta / pi_p below/above = " << lo / pi_p(1.8)
         << " / " << hi / pi_p(1.8);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"pi_p and p-trig", criterion1},
      {"eigenvalue oracle, scaling, monotonicity", criterion2},
      {"bifurcation onsets p = 2", criterion3},
      {"three solutions at q = 100", criterion4},
      {"comparison with eigen phase", criterion5},
      {"p = 3, q = 4 oscillation", criterion6},
      {"p = 1.8 threshold and pair", criterion7},
      {"numerical robustness", criterion8},
      {"annulus path", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << "[exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.note.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}

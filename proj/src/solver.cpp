#include "plap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "plap/errors.hpp"
#include "plap/parallel.hpp"

namespace plap {

const char* to_string(Side side) { return side == Side::Lower ? "lower" : "upper"; }

std::vector<double> scan_grid(const SolverConfig& cfg, Side side) {
  cfg.validate();
  const int n = cfg.d_grid_size;
  const int n_geo = int(std::lround(cfg.refine_near_one * n));
  const int n_uni = n - n_geo;
  const double lo = side == Side::Lower ? cfg.d_min : cfg.d_upper_min;
  const double hi = side == Side::Lower ? cfg.d_max : cfg.d_upper_max;

  std::vector<double> grid;
  grid.reserve(std::size_t(n));
  for (int i = 0; i < n_uni; ++i)
    grid.push_back(n_uni == 1 ? lo : lo + (hi - lo) * double(i) / double(n_uni - 1));

  // Geometric in the distance s = |1 - d|.
  const double s_near = side == Side::Lower ? 1.0 - hi : lo - 1.0;
  const double s_far = side == Side::Lower ? 1.0 - lo : hi - 1.0;
  for (int i = 0; i < n_geo; ++i) {
    const double t = n_geo == 1 ? 0.0 : double(i) / double(n_geo - 1);
    const double s = s_near * std::pow(s_far / s_near, t);
    grid.push_back(side == Side::Lower ? 1.0 - s : 1.0 + s);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

namespace {

double try_phase(double d, const ProblemSpec& spec, const SolverConfig& cfg) {
  try {
    return shoot(d, spec, cfg).summary.theta_end;
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::vector<ScanPoint> theta_scan(const ProblemSpec& spec, const SolverConfig& cfg, Side side) {
  const std::vector<double> grid = scan_grid(cfg, side);
  std::vector<ScanPoint> out(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
    out[i] = {grid[i], try_phase(grid[i], spec, cfg)};
  });
  return out;
}

namespace {

// Bisects Theta(d) - level on [a, b] where the sign differs at the ends,
// down to bisect_tol_d and further while the phase residual still exceeds
// half the phase tolerance (Theta is very steep close to d = 1).
// Returns the endpoint of the final bracket with the smaller residual.
double bisect_root(double a, double ga, double b, double gb, double level, double phase_tol,
                   const ProblemSpec& spec, const SolverConfig& cfg) {
  auto done = [&] {
    return b - a <= cfg.bisect_tol_d && std::min(std::abs(ga), std::abs(gb)) <= 0.5 * phase_tol;
  };
  for (int it = 0; it < 200 && !done(); ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double gm = shoot(m, spec, cfg).summary.theta_end - level;
    if ((gm < 0) == (ga < 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
      gb = gm;
    }
  }
  return std::abs(ga) <= std::abs(gb) ? a : b;
}

struct Bracket {
  double a, ga, b, gb;
  int j;
  double level;
};

}  // namespace

SolutionSet find_solutions(const ProblemSpec& spec, const SolverConfig& cfg,
                           const SolveOptions& opts) {
  if (opts.max_zeros < 1) throw std::domain_error("max_zeros must be >= 1");
  cfg.validate();
  const double pi = pi_p(spec.p());
  const double phase_tol = cfg.phase_tol_rel * pi;

  SolutionSet result;
  std::vector<Side> sides;
  if (opts.sides != Sides::Upper) sides.push_back(Side::Lower);
  if (opts.sides != Sides::Lower) sides.push_back(Side::Upper);

  for (Side side : sides) {
    const auto scan = theta_scan(spec, cfg, side);
    for (const auto& pt : scan)
      if (std::isnan(pt.theta)) ++result.failed_shots;

    std::vector<Bracket> brackets;
    for (int j = 1; j <= opts.max_zeros; ++j) {
      if (opts.only_zero_count && *opts.only_zero_count != j) continue;
      const double level = side == Side::Lower ? (j + 1) * pi : j * pi;
      for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
        const double ga = scan[i].theta - level;
        const double gb = scan[i + 1].theta - level;
        if (std::isnan(ga) || std::isnan(gb)) continue;
        if ((ga < 0) != (gb < 0)) brackets.push_back({scan[i].d, ga, scan[i + 1].d, gb, j, level});
      }
    }

    std::vector<std::optional<SolutionRecord>> found(brackets.size());
    std::vector<std::optional<RejectedRoot>> rejected(brackets.size());
    parallel_for(brackets.size(), cfg.threads, [&](std::size_t bi) {
      const Bracket& br = brackets[bi];
      double d = 0.5 * (br.a + br.b);
      auto reject = [&](const std::string& why) {
        rejected[bi] = RejectedRoot{d, side, br.j, why};
      };
      try {
        d = bisect_root(br.a, br.ga, br.b, br.gb, br.level, phase_tol, spec, cfg);
        Shot shot = shoot(d, spec, cfg);
        const ShotSummary& s = shot.summary;
        std::ostringstream why;
        if (std::abs(s.theta_end - br.level) > phase_tol)
          why << "phase residual " << std::abs(s.theta_end - br.level) << " exceeds tolerance; ";
        if (s.zeros != br.j) why << "zero count " << s.zeros << " != " << br.j << "; ";
        if (!(s.min_u > 0)) why << "profile not positive (min u = " << s.min_u << "); ";
        if (std::abs(s.v_end) > cfg.residual_tol * s.max_abs_v)
          why << "boundary flux |v(R)| = " << std::abs(s.v_end) << " too large; ";
        if (!(s.max_u - s.min_u > 1e-6)) why << "profile is numerically constant; ";
        if (!why.str().empty()) {
          reject(why.str());
          return;
        }
        found[bi] = SolutionRecord{d, side, br.j, std::move(shot.trajectory), s.theta_end, s.v_end};
      } catch (const NumericalError& e) {
        reject(e.what());
      }
    });
    for (auto& f : found)
      if (f) result.records.push_back(std::move(*f));
    for (auto& r : rejected)
      if (r) result.rejected.push_back(std::move(*r));
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const SolutionRecord& x, const SolutionRecord& y) {
              return std::tie(x.j, x.side, x.d_root) < std::tie(y.j, y.side, y.d_root);
            });
  return result;
}

double max_scan_phase(const ProblemSpec& spec, const SolverConfig& cfg) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& pt : theta_scan(spec, cfg, Side::Lower))
    if (std::isfinite(pt.theta)) best = std::max(best, pt.theta);
  return best;
}

ProblemSpec rstar_problem(const ProblemSpec& tmpl, double radius,
                          std::optional<double> annulus_ratio) {
  if (annulus_ratio) {
    if (!(*annulus_ratio > 0 && *annulus_ratio < 1))
      throw std::domain_error("annulus ratio must lie in (0, 1)");
    return ProblemSpec(tmpl.exponent, tmpl.dim, Annulus{*annulus_ratio * radius, radius}, tmpl.g);
  }
  return ProblemSpec(tmpl.exponent, tmpl.dim, Ball{radius}, tmpl.g);
}

RstarResult rstar(const ProblemSpec& tmpl, const SolverConfig& cfg, int k,
                  std::optional<double> annulus_ratio) {
  if (k < 1) throw std::domain_error("rstar requires k >= 1");
  if (tmpl.g.c1() != 0.0)
    throw std::domain_error("rstar applies to the C1 = 0 regime (p < 2)");
  const double target = (k + 1) * pi_p(tmpl.p());
  auto above = [&](double radius) {
    return max_scan_phase(rstar_problem(tmpl, radius, annulus_ratio), cfg) > target;
  };

  double lo = 1.0, hi = 1.0;
  if (above(1.0)) {
    do {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-8) throw SearchError("rstar: predicate holds down to R = 1e-8");
    } while (above(lo));
  } else {
    do {
      lo = hi;
      hi *= 2.0;
      if (hi > cfg.r_cap)
        throw SearchError("rstar: predicate never true below R_cap = " +
                          format_g(cfg.r_cap) + " (last bracket [" +
                          format_g(lo) + ", " + format_g(hi) + "])");
    } while (!above(hi));
  }
  while (hi - lo > 1e-3 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid))
      hi = mid;
    else
      lo = mid;
  }
  return RstarResult{k, 0.5 * (lo + hi), lo, hi};
}

}  // namespace plap

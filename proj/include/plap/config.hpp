#pragma once

#include <cstddef>
#include <optional>

namespace plap {

// Numerical knobs shared by shooting, eigenvalue and root-finding code.
struct SolverConfig {
  // d-scan grid. A fraction `refine_near_one` of the points is spaced
  // geometrically in |1 - d|, the rest uniformly.
  int d_grid_size = 2000;
  double d_min = 1e-4;
  double d_max = 1.0 - 1e-6;
  double d_upper_min = 1.0 + 1e-6;
  double d_upper_max = 50.0;  // pragmatic cap on upper-side shots
  double refine_near_one = 0.5;

  double bisect_tol_d = 1e-12;
  double residual_tol = 1e-7;

  // Start radius of ball shots; defaults to 1e-8 times the outer radius.
  std::optional<double> eps0;
  // Floor on the phase-plane distance rho^{2/p} to (1, 0).
  double rho_floor = 1e-12;
  // Phase tolerance as a multiple of pi_p.
  double phase_tol_rel = 1e-8;

  // One decade below the bare integrator defaults: roots in d must not move
  // by more than 1e-8 when these are tightened further.
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  std::size_t max_steps = 1'000'000;

  // Eigenvalue bracket cap, in units of R^{-p}.
  double lambda_max = 1e8;
  double lambda_rel_tol = 1e-10;
  int lambda_max_iter = 200;

  // Radius cap for the threshold search.
  double r_cap = 1e4;

  // Worker threads for scans; 0 means hardware concurrency.
  unsigned threads = 0;

  // Throws std::invalid_argument naming the violated condition.
  void validate() const;

  double eps0_for(double outer_radius) const {
    return eps0 ? *eps0 : 1e-8 * outer_radius;
  }
};

}  // namespace plap

#pragma once

// Root-finding in the shooting parameter d.
//
// Lower side (0 < d < 1): theta starts at pi_p and a Neumann solution with
// j zeros of u - 1 has Theta(d) = (j + 1) pi_p.
// Upper side (d > 1): theta starts at 0 and the condition is Theta(d) = j pi_p.

#include <optional>
#include <string>
#include <vector>

#include "plap/config.hpp"
#include "plap/radial_system.hpp"

namespace plap {

enum class Side { Lower, Upper };
enum class Sides { Lower, Upper, Both };

const char* to_string(Side side);

struct ScanPoint {
  double d;
  double theta;  // NaN when the shot failed
};

// Shooting values visited by theta_scan, sorted increasingly.
std::vector<double> scan_grid(const SolverConfig& cfg, Side side);

// Theta(d) over the scan grid; no monotone re-sorting of the values.
std::vector<ScanPoint> theta_scan(const ProblemSpec& spec, const SolverConfig& cfg,
                                  Side side = Side::Lower);

struct SolutionRecord {
  double d_root = 0;
  Side side = Side::Lower;
  int j = 0;
  Trajectory profile;
  double theta_end = 0;
  double v_end = 0;
};

struct RejectedRoot {
  double d = 0;
  Side side = Side::Lower;
  int j = 0;
  std::string reason;
};

struct SolutionSet {
  std::vector<SolutionRecord> records;  // sorted by (j, side, d)
  std::vector<RejectedRoot> rejected;   // failed validation; reported, not returned as solutions
  int failed_shots = 0;                 // scan shots that raised numerical errors
};

struct SolveOptions {
  int max_zeros = 1;
  Sides sides = Sides::Lower;
  // Restrict the search to one zero count.
  std::optional<int> only_zero_count;
};

SolutionSet find_solutions(const ProblemSpec& spec, const SolverConfig& cfg,
                           const SolveOptions& opts);

inline SolutionSet find_solutions(const ProblemSpec& spec, const SolverConfig& cfg,
                                  int max_zeros, Sides sides = Sides::Lower) {
  return find_solutions(spec, cfg, SolveOptions{max_zeros, sides, std::nullopt});
}

// Largest finite Theta over the lower-side scan.
double max_scan_phase(const ProblemSpec& spec, const SolverConfig& cfg);

struct RstarResult {
  int k = 1;
  double rstar = 0;
  // Bracket with the predicate false at `below` and true at `above`.
  double below = 0;
  double above = 0;
};

// Threshold radius beyond which max_d Theta(d; R) > (k + 1) pi_p, for the
// C1 = 0 regime. With `annulus_ratio` = eps the domain is the annulus
// (eps R, R) and the returned value is the outer radius.
RstarResult rstar(const ProblemSpec& tmpl, const SolverConfig& cfg, int k,
                  std::optional<double> annulus_ratio = std::nullopt);

// The domain used by rstar for outer radius R.
ProblemSpec rstar_problem(const ProblemSpec& tmpl, double radius,
                          std::optional<double> annulus_ratio);

}  // namespace plap

#pragma once

// Parameter continuation by re-solving at every grid value of q (or R).

#include <string>
#include <vector>

#include "plap/solver.hpp"

namespace plap {

enum class SweepParameter { Q, Radius };

const char* to_string(SweepParameter param);

struct BranchRow {
  double param = 0;
  double d_root = 0;
  int j = 0;
  Side side = Side::Lower;
  double theta_end = 0;
  // Set when no root of the same (j, side) at the previous grid value lies
  // within 0.2 in d: a fold, a split or the start of a branch segment.
  bool fold_marker = false;
};

struct BranchTable {
  SweepParameter parameter = SweepParameter::Q;
  std::vector<double> grid;
  std::vector<BranchRow> rows;  // sorted by (j, side, param, d_root)
  double p = 0;
  int dim = 1;
  double radius = 0;
  int max_zeros = 1;
  int failed_shots = 0;
  int rejected_roots = 0;
};

// Problem at one grid value of the sweep parameter.
ProblemSpec sweep_problem(const ProblemSpec& tmpl, SweepParameter param, double value);

BranchTable branch_sweep(const ProblemSpec& tmpl, SweepParameter param, double lo, double hi,
                         int steps, const SolverConfig& cfg, int max_zeros,
                         Sides sides = Sides::Both);

// Smallest q in [q_lo, q_hi] (to relative 1e-3) at which a lower-side
// solution with j zeros exists. Restricted to p = 2.
double bifurcation_onset(const ProblemSpec& tmpl, int j, const SolverConfig& cfg,
                         double q_lo, double q_hi);

// Polylines of param vs d, one per (j, side).
std::string branch_svg(const BranchTable& table);

}  // namespace plap

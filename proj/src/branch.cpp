#include "plap/branch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "plap/errors.hpp"

namespace plap {

const char* to_string(SweepParameter param) { return param == SweepParameter::Q ? "q" : "R"; }

ProblemSpec sweep_problem(const ProblemSpec& tmpl, SweepParameter param, double value) {
  if (param == SweepParameter::Radius) return tmpl.with_outer_radius(value);
  const Nonlinearity g = tmpl.g.kind() == Nonlinearity::Kind::PurePower
                             ? Nonlinearity::pure_power(value, tmpl.exponent)
                             : Nonlinearity::power_combo(value, tmpl.g.r_exp(), tmpl.exponent);
  return tmpl.with_nonlinearity(g);
}

BranchTable branch_sweep(const ProblemSpec& tmpl, SweepParameter param, double lo, double hi,
                         int steps, const SolverConfig& cfg, int max_zeros, Sides sides) {
  if (steps < 1) throw std::domain_error("sweep needs at least one step");
  if (!(lo <= hi)) throw std::domain_error("sweep range must satisfy lo <= hi");
  if (param == SweepParameter::Q && !(lo > tmpl.p()))
    throw std::domain_error("q sweep must stay above p");
  if (param == SweepParameter::Radius && !(lo > 0))
    throw std::domain_error("radius sweep must stay positive");

  BranchTable table;
  table.parameter = param;
  table.p = tmpl.p();
  table.dim = tmpl.dim;
  table.radius = tmpl.outer_radius();
  table.max_zeros = max_zeros;
  for (int i = 0; i <= steps; ++i) table.grid.push_back(lo + (hi - lo) * double(i) / steps);
  table.grid.erase(std::unique(table.grid.begin(), table.grid.end()), table.grid.end());

  for (double value : table.grid) {
    const SolutionSet set = find_solutions(sweep_problem(tmpl, param, value), cfg,
                                           SolveOptions{max_zeros, sides, std::nullopt});
    table.failed_shots += set.failed_shots;
    table.rejected_roots += int(set.rejected.size());
    for (const auto& rec : set.records)
      table.rows.push_back({value, rec.d_root, rec.j, rec.side, rec.theta_end, false});
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const BranchRow& a, const BranchRow& b) {
    return std::tie(a.j, a.side, a.param, a.d_root) < std::tie(b.j, b.side, b.param, b.d_root);
  });

  // Fold / split markers: compare each row with the rows of the same
  // (j, side) at the preceding grid value.
  std::map<std::pair<int, int>, std::map<double, std::vector<double>>> by_branch;
  for (const auto& row : table.rows) by_branch[{row.j, int(row.side)}][row.param].push_back(row.d_root);
  for (auto& row : table.rows) {
    const auto& params = by_branch[{row.j, int(row.side)}];
    auto it = params.find(row.param);
    if (it == params.begin()) continue;
    const auto& prev = std::prev(it)->second;
    double nearest = INFINITY;
    for (double d : prev) nearest = std::min(nearest, std::abs(d - row.d_root));
    row.fold_marker = nearest > 0.2;
  }
  return table;
}

double bifurcation_onset(const ProblemSpec& tmpl, int j, const SolverConfig& cfg,
                         double q_lo, double q_hi) {
  if (j < 1) throw std::domain_error("zero count j must be >= 1");
  if (tmpl.p() != 2.0)
    throw std::domain_error("bifurcation_onset requires p = 2 (finite nonzero C1)");
  if (!(q_lo > tmpl.p() && q_lo < q_hi)) throw std::domain_error("need p < q_lo < q_hi");

  auto has_solution = [&](double q) {
    const auto set = find_solutions(sweep_problem(tmpl, SweepParameter::Q, q), cfg,
                                     SolveOptions{j, Sides::Lower, j});
    return !set.records.empty();
  };
  const bool at_lo = has_solution(q_lo);
  const bool at_hi = has_solution(q_hi);
  if (at_lo == at_hi) {
    std::ostringstream msg;
    msg << "bifurcation_onset: predicate is " << (at_lo ? "true" : "false")
        << " at both ends of [" << q_lo << ", " << q_hi << "]";
    throw SearchError(msg.str());
  }
  double lo = q_lo, hi = q_hi;
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (has_solution(mid) == at_hi ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string branch_svg(const BranchTable& table) {
  const double w = 640, h = 480, m = 50;
  double x0 = table.grid.empty() ? 0 : table.grid.front();
  double x1 = table.grid.empty() ? 1 : table.grid.back();
  if (x1 == x0) x1 = x0 + 1;
  double y0 = 0, y1 = 1;
  for (const auto& r : table.rows) y1 = std::max(y1, r.d_root);
  auto sx = [&](double x) { return m + (x - x0) / (x1 - x0) * (w - 2 * m); };
  auto sy = [&](double y) { return h - m - (y - y0) / (y1 - y0) * (h - 2 * m); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  out << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << w - 2 * m << "\" height=\""
      << h - 2 * m << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << m << "\" y1=\"" << sy(1) << "\" x2=\"" << w - m << "\" y2=\"" << sy(1)
      << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\">" << to_string(table.parameter)
      << "</text>\n<text x=\"5\" y=\"" << h / 2 << "\">d</text>\n";

  std::map<std::pair<int, int>, std::vector<const BranchRow*>> groups;
  for (const auto& r : table.rows) groups[{r.j, int(r.side)}].push_back(&r);
  for (const auto& [key, rows] : groups) {
    const char* color = colors[(key.first - 1) % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const BranchRow* r : rows) {
      if (r->fold_marker) out << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      out << sx(r->param) << ',' << sy(r->d_root) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace plap

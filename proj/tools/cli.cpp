#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "plap/branch.hpp"
#include "plap/eigenvalue.hpp"
#include "plap/errors.hpp"
#include "plap/solver.hpp"

namespace plap::cli {

using Json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_profile_csv(std::ostream& os, const Trajectory& t) {
  os << "r,u,v,theta,rho_sq\n";
  for (Eigen::Index i = 0; i < t.size(); ++i)
    os << format_double(t.r(i)) << ',' << format_double(t.u(i)) << ',' << format_double(t.v(i))
       << ',' << format_double(t.theta(i)) << ',' << format_double(t.rho_sq(i)) << '\n';
}

Trajectory read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "r,u,v,theta,rho_sq")
    throw std::invalid_argument("profile CSV: missing header r,u,v,theta,rho_sq");
  std::vector<std::array<double, 5>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 5> row{};
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < 5; ++c) {
      if (!std::getline(ls, cell, ','))
        throw std::invalid_argument("profile CSV: short row '" + line + "'");
      std::size_t used = 0;
      row[std::size_t(c)] = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument("profile CSV: bad number '" + cell + "'");
    }
    rows.push_back(row);
  }
  Trajectory t;
  const auto n = Eigen::Index(rows.size());
  t.r.resize(n);
  t.u.resize(n);
  t.v.resize(n);
  t.theta.resize(n);
  t.rho_sq.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[std::size_t(i)];
    t.r(i) = row[0];
    t.u(i) = row[1];
    t.v(i) = row[2];
    t.theta(i) = row[3];
    t.rho_sq(i) = row[4];
  }
  return t;
}

namespace {

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument(what + ": '" + text + "' is not a number");
  return x;
}

}  // namespace

Nonlinearity parse_nonlinearity(const std::string& text, const PExponent& p) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (family == "pow") {
    if (args.empty()) throw std::invalid_argument("--g pow needs an exponent: pow:<q>");
    return Nonlinearity::pure_power(parse_number(args, "--g pow:<q>"), p);
  }
  if (family == "combo") {
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("--g combo needs two exponents: combo:<q>,<r>");
    return Nonlinearity::power_combo(parse_number(args.substr(0, comma), "--g combo q"),
                                     parse_number(args.substr(comma + 1), "--g combo r"), p);
  }
  throw std::invalid_argument("--g must be pow:<q> or combo:<q>,<r> (got '" + text + "')");
}

namespace {

struct Globals {
  std::optional<double> tol;
  std::optional<double> eps0;
  unsigned threads = 0;
  std::string out;
  std::string format;
};

struct GeomFlags {
  double p = 2.0;
  int n = 1;
  double r = 1.0;
  std::string annulus;
};

void add_geometry(CLI::App* sub, GeomFlags& g, bool with_radius = true) {
  sub->add_option("--p", g.p, "exponent p > 1")->required();
  sub->add_option("--n", g.n, "space dimension N >= 1");
  if (with_radius) {
    sub->add_option("--r", g.r, "ball radius R");
    sub->add_option("--annulus", g.annulus, "annulus radii R1,R2 (replaces the ball)")
        ->default_str("none");
  }
}

Geometry make_geometry(const GeomFlags& g) {
  PExponent p(g.p);
  Geometry geom{p, g.n, Ball{g.r}};
  if (!g.annulus.empty()) {
    const auto comma = g.annulus.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--annulus expects R1,R2");
    geom.domain = Annulus{parse_number(g.annulus.substr(0, comma), "--annulus R1"),
                          parse_number(g.annulus.substr(comma + 1), "--annulus R2")};
  }
  geom.validate();
  return geom;
}

SolverConfig make_config(const Globals& gl) {
  SolverConfig cfg;
  if (gl.tol) {
    cfg.rel_tol = *gl.tol;
    cfg.abs_tol = std::max(1e-14, 1e-2 * *gl.tol);
  }
  cfg.eps0 = gl.eps0;
  cfg.threads = gl.threads;
  cfg.validate();
  return cfg;
}

// Writes to --out when given, otherwise to `out`.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
  f << text;
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
  if (format.empty()) return;
  for (const char* a : allowed)
    if (format == a) return;
  throw std::invalid_argument("--format " + format + " is not supported by this subcommand");
}

Json shot_json(const ShotSummary& s) {
  return Json{{"d", s.d},         {"theta_end", s.theta_end}, {"v_end", s.v_end},
              {"u_end", s.u_end}, {"zeros", s.zeros},         {"min_u", s.min_u},
              {"max_u", s.max_u}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial Neumann problems for the p-Laplacian by shooting in p-polar coordinates",
               "plap"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  Globals gl;
  app.add_option("--tol", gl.tol, "integrator relative tolerance (absolute = 1e-2 * tol)")
      ->default_str(format_g(SolverConfig{}.rel_tol));
  app.add_option("--eps0", gl.eps0, "start radius of ball shots")->default_str("1e-8 R");
  app.add_option("--threads", gl.threads, "worker threads, 0 = available parallelism");
  app.add_option("--out", gl.out, "output path")->default_str("stdout");
  app.add_option("--format", gl.format, "json or csv")
      ->default_str("per subcommand")
      ->check(CLI::IsMember({"json", "csv"}));

  // ptrig
  auto* ptrig = app.add_subcommand("ptrig", "p-cosine and p-sine as CSV theta,cos_p,sin_p");
  double ptrig_p = 2.0, ptrig_theta = 0.0;
  int ptrig_table = 0;
  ptrig->add_option("--p", ptrig_p, "exponent p > 1")->required();
  auto* theta_opt = ptrig->add_option("--theta", ptrig_theta, "single phase");
  ptrig->add_option("--table", ptrig_table, "n evenly spaced phases over [0, 2 pi_p), 0 = off")
      ->excludes(theta_opt);

  // eigen
  auto* eigen = app.add_subcommand("eigen", "k-th radial Neumann eigenvalue");
  GeomFlags eg;
  int eigen_k = 1;
  bool eigen_json = false;
  add_geometry(eigen, eg);
  eigen->add_option("--k", eigen_k, "eigenvalue index k >= 1")->required();
  eigen->add_flag("--json", eigen_json, "JSON output")->default_str("true unless --format csv");

  // shoot
  auto* shoot_cmd = app.add_subcommand("shoot", "single shot, CSV r,u,v,theta,rho_sq");
  GeomFlags sg;
  std::string shoot_g;
  double shoot_d = 0;
  add_geometry(shoot_cmd, sg);
  shoot_cmd->add_option("--g", shoot_g, "pow:<q> or combo:<q>,<r>")->required();
  shoot_cmd->add_option("--d", shoot_d, "shooting value u(0), or u(R1) on an annulus")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "all solutions up to a zero count, JSON summary");
  GeomFlags vg;
  std::string solve_g, solve_sides = "lower";
  int solve_k = 1;
  add_geometry(solve, vg);
  solve->add_option("--g", solve_g, "pow:<q> or combo:<q>,<r>")->required();
  solve->add_option("--max-zeros", solve_k, "largest zero count j");
  solve->add_option("--sides", solve_sides, "lower, upper or both")
      ->check(CLI::IsMember({"lower", "upper", "both"}));

  // branch
  auto* branch = app.add_subcommand("branch", "sweep in q, CSV param,d,j,side,theta_end");
  GeomFlags bg;
  std::string branch_g = "pow", branch_svg_path, branch_sides = "both";
  double q_min = 0, q_max = 0;
  int steps = 10, branch_k = 1;
  add_geometry(branch, bg);
  branch->add_option("--g", branch_g, "family: pow, or combo:<r> with fixed r");
  branch->add_option("--q-min", q_min, "first q")->required();
  branch->add_option("--q-max", q_max, "last q")->required();
  branch->add_option("--steps", steps, "number of q intervals");
  branch->add_option("--max-zeros", branch_k, "largest zero count j");
  branch->add_option("--sides", branch_sides, "lower, upper or both")
      ->check(CLI::IsMember({"lower", "upper", "both"}));
  branch->add_option("--svg", branch_svg_path, "also render param-vs-d polylines to this file")
      ->default_str("none");

  // rstar
  auto* rstar_cmd = app.add_subcommand("rstar", "threshold radius R_*(k) for p < 2");
  GeomFlags rg;
  std::string rstar_g;
  int rstar_k = 1;
  std::optional<double> ratio;
  add_geometry(rstar_cmd, rg, false);
  rstar_cmd->add_option("--g", rstar_g, "pow:<q> or combo:<q>,<r>")->required();
  rstar_cmd->add_option("--k", rstar_k, "target k >= 1")->required();
  rstar_cmd->add_option("--annulus-ratio", ratio, "use the annulus (eps R, R), 0 < eps < 1")
      ->default_str("none (ball)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : UsageError;
  }

  try {
    const SolverConfig cfg = make_config(gl);

    if (*ptrig) {
      check_format(gl.format, {"csv", "json"});
      const auto ctx = PTrigContext::shared(PExponent(ptrig_p).p());
      std::vector<double> thetas;
      if (ptrig_table > 0) {
        for (int i = 0; i < ptrig_table; ++i)
          thetas.push_back(2.0 * ctx->pi_p() * double(i) / double(ptrig_table));
      } else if (ptrig_table < 0) {
        throw std::invalid_argument("--table must be positive");
      } else {
        thetas.push_back(ptrig_theta);
      }
      std::ostringstream os;
      if (gl.format == "json") {
        Json rows = Json::array();
        for (double t : thetas) {
          const PTrigPair cs = (*ctx)(t);
          rows.push_back({{"theta", t}, {"cos_p", cs.cos_p}, {"sin_p", cs.sin_p}});
        }
        os << Json{{"p", ptrig_p}, {"pi_p", ctx->pi_p()}, {"rows", rows}}.dump(2) << '\n';
      } else {
        os << "theta,cos_p,sin_p\n";
        for (double t : thetas) {
          const PTrigPair cs = (*ctx)(t);
          os << format_double(t) << ',' << format_double(cs.cos_p) << ','
             << format_double(cs.sin_p) << '\n';
        }
      }
      emit(gl.out, out, os.str());
    } else if (*eigen) {
      check_format(gl.format, {"csv", "json"});
      const Geometry geom = make_geometry(eg);
      const EigenResult res = eigenvalue(eigen_k, geom, cfg);
      std::ostringstream os;
      if (gl.format == "csv" && !eigen_json)
        os << "k,lambda,residual\n"
           << res.k << ',' << format_double(res.lambda) << ',' << format_double(res.angle_residual)
           << '\n';
      else
        os << Json{{"k", res.k}, {"lambda", res.lambda}, {"residual", res.angle_residual}}.dump(2)
           << '\n';
      emit(gl.out, out, os.str());
    } else if (*shoot_cmd) {
      check_format(gl.format, {"csv", "json"});
      const Geometry geom = make_geometry(sg);
      const ProblemSpec spec(geom, parse_nonlinearity(shoot_g, geom.exponent));
      const Shot shot = shoot(shoot_d, spec, cfg);
      std::ostringstream csv;
      write_profile_csv(csv, shot.trajectory);
      const std::string summary = shot_json(shot.summary).dump(2) + "\n";
      if (!gl.out.empty()) {
        emit(gl.out, out, csv.str());
        out << summary;
      } else {
        out << (gl.format == "json" ? summary : csv.str());
      }
    } else if (*solve) {
      check_format(gl.format, {"json"});
      const Geometry geom = make_geometry(vg);
      const ProblemSpec spec(geom, parse_nonlinearity(solve_g, geom.exponent));
      const Sides sides = solve_sides == "upper"   ? Sides::Upper
                          : solve_sides == "both" ? Sides::Both
                                                  : Sides::Lower;
      const SolutionSet set = find_solutions(spec, cfg, solve_k, sides);
      Json sols = Json::array();
      int index = 0;
      for (const auto& rec : set.records) {
        Json item{{"d", rec.d_root},
                  {"j", rec.j},
                  {"side", to_string(rec.side)},
                  {"theta_end", rec.theta_end},
                  {"v_end", rec.v_end}};
        if (!gl.out.empty()) {
          const std::string path = gl.out + "_j" + std::to_string(rec.j) + "_" +
                                   to_string(rec.side) + "_" + std::to_string(index++) + ".csv";
          std::ofstream f(path);
          if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
          write_profile_csv(f, rec.profile);
          item["profile"] = path;
        }
        sols.push_back(item);
      }
      Json rejected = Json::array();
      for (const auto& r : set.rejected)
        rejected.push_back(
            {{"d", r.d}, {"j", r.j}, {"side", to_string(r.side)}, {"reason", r.reason}});
      out << Json{{"solutions", sols}, {"rejected", rejected}, {"failed_shots", set.failed_shots}}
                 .dump(2)
          << '\n';
    } else if (*branch) {
      check_format(gl.format, {"csv"});
      const Geometry geom = make_geometry(bg);
      // The template nonlinearity only fixes the family; q comes from the grid.
      Nonlinearity g = Nonlinearity::pure_power(std::max(q_min, geom.p() + 1.0), geom.exponent);
      if (branch_g.rfind("combo:", 0) == 0) {
        const double r = parse_number(branch_g.substr(6), "--g combo:<r>");
        g = Nonlinearity::power_combo(std::max(q_min, r + 1.0), r, geom.exponent);
      } else if (branch_g != "pow" && branch_g.rfind("pow:", 0) != 0) {
        throw std::invalid_argument("--g for branch must be pow or combo:<r>");
      }
      const Sides sides = branch_sides == "upper"   ? Sides::Upper
                          : branch_sides == "lower" ? Sides::Lower
                                                    : Sides::Both;
      const BranchTable table = branch_sweep(ProblemSpec(geom, g), SweepParameter::Q, q_min,
                                             q_max, steps, cfg, branch_k, sides);
      std::ostringstream os;
      os << "param,d,j,side,theta_end\n";
      for (const auto& row : table.rows)
        os << format_double(row.param) << ',' << format_double(row.d_root) << ',' << row.j << ','
           << to_string(row.side) << ',' << format_double(row.theta_end) << '\n';
      emit(gl.out, out, os.str());
      if (!branch_svg_path.empty()) emit(branch_svg_path, out, branch_svg(table));
    } else if (*rstar_cmd) {
      check_format(gl.format, {"json"});
      GeomFlags flags = rg;
      flags.r = 1.0;
      const Geometry geom = make_geometry(flags);
      const ProblemSpec spec(geom, parse_nonlinearity(rstar_g, geom.exponent));
      const RstarResult res = rstar(spec, cfg, rstar_k, ratio);
      emit(gl.out, out,
           Json{{"k", res.k}, {"rstar", res.rstar}, {"below", res.below}, {"above", res.above}}
                   .dump(2) +
               "\n");
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return NumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return UsageError;
  } catch (const std::domain_error& e) {
    err << "precondition violated: " << e.what() << '\n';
    return UsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return NumericalFailure;
  }
  return Ok;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace plap::cli

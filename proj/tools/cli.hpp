#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "plap/radial_system.hpp"

namespace plap::cli {

enum ExitCode { Ok = 0, NumericalFailure = 1, UsageError = 2 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// 17 significant digits, '.' decimal.
std::string format_double(double x);

void write_profile_csv(std::ostream& os, const Trajectory& t);
Trajectory read_profile_csv(std::istream& is);

// "pow:<q>" or "combo:<q>,<r>".
Nonlinearity parse_nonlinearity(const std::string& text, const PExponent& p);

}  // namespace plap::cli

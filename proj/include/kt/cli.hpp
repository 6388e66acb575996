#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kt::cli {

/// Runs one command line (without the program name). Returns the exit code:
/// 0 success, 2 input or parse error, 3 precondition violation, 4 numeric
/// failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Convention summary printed by --version.
std::string convention_ledger();

} // namespace kt::cli

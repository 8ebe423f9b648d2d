#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edgeprune {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

/// Runs the command-line interface on `args` (args[0] is the program name).
/// Subcommands: generate, poison, sanitize, eval, sweep, inspect.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgeprune

#pragma once

#include <iosfwd>

namespace ictmc::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kNegative = 1,  // not ergodic, or a property violation
  kInputError = 2,
  kNotConverged = 3,
};

/// Runs the command line; reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ictmc::cli

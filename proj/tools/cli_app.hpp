#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasestat::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitStatistical = 3;

/// Runs the command line `args` (args[0] is the program name) and returns the
/// exit code. Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasestat::cli

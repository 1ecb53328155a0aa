#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ecim::cli {

/// Exit codes of the `verify` subcommand; other subcommands return kOk or kError.
inline constexpr int kOk = 0;
inline constexpr int kFail = 1;
inline constexpr int kAssumptionUnverified = 2;
inline constexpr int kError = 3;

/// Runs the command line `args` (args[0] is the program name). Summaries go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecim::cli

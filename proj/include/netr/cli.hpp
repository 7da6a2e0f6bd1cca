#pragma once

#include <iosfwd>

namespace netr {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInvariant = 3 };

/// Entry point of the `netr` tool (build, query, gen, bench). Normal output
/// goes to `out`, diagnostics to `err`; logging goes to stderr.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace netr

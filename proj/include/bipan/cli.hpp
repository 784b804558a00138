#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bipan::cli {

/// Exit codes of the `bipan` tool.
enum ExitCode : int {
  kSuccess = 0,
  kFindings = 1,  // validation errors or infeasible plan
  kUsage = 2,     // bad flags, unreadable or unparsable input, unknown ids
  kRuntime = 3,   // write failures, digest mismatch, replay failure
};

/// Runs the command line `args` (without the program name). Payloads go to
/// `out`, diagnostics to `err`; every failure ends with exactly one
/// `error: <code>: <detail>` line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bipan::cli

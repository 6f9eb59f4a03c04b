#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cqsm {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

/// Entry point of the `cqsm` tool: subcommands run, solve-lq,
/// check-martingale, sample-actions and replay.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqsm

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "xaibench/error.hpp"

namespace xaibench {

// Process exit codes by error category.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitFormat = 4;
inline constexpr int kExitReference = 5;

int exit_code_for(ErrorKind kind);

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code. Progress goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xaibench

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nehari {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_nonconvergence = 3,
    exit_regime = 4,
    exit_verification = 5,
};

/// Runs one nehari-lab invocation; `args` excludes the program name.
/// Summaries go to `out`, diagnostics to `err`, artifacts to output.directory.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nehari

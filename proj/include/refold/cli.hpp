#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace refold::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failed = 1,
    exit_usage = 2,
    exit_budget = 3,
    exit_inconsistent = 4,
};

/// `args` excludes the program name. The report goes to `out`; text-mode
/// errors go to `err`. JSON mode writes exactly one document to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace refold::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bmatch::cli {

/// Runs one command line (args excludes the program name).
/// Exit codes: 0 success, 1 validation or usage error, 2 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bmatch::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace segstat {

/// Runs the segstat command line (arguments without the program name).
/// Returns 0 on success, 1 on a runtime failure and 2 on invalid input or
/// usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segstat

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vcount::cli {

/// Entry point for the `vcount` tool. args[0] is the program name.
/// Returns the process exit code (see ExitCode).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vcount::cli

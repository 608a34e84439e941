#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace boresight::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kSolver = 3 };

/// Entry point of the `boresight` tool. Reports go to `out`, diagnostics and
/// usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boresight::cli

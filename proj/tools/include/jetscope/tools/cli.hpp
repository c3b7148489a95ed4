#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jetscope::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInconclusive = 2, kViolation = 3 };

/// Runs one jetscope invocation. `args` excludes the program name. Reports go
/// to `out`; errors are written to `err` as {"code", "message"} JSON.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jetscope::cli

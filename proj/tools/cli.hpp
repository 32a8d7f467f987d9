#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lssclt::cli {

/// Exit codes. Statistical decisions never change the exit code.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;    // operational error (I/O, parse, numerics)
inline constexpr int kRefused = 3;    // regime violation or guardrail refusal

/// Runs the command line `args` (without the program name). Results go to
/// `out`, progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lssclt::cli

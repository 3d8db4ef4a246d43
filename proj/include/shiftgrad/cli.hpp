#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace shiftgrad::cli {

enum ExitCode : int { ok = 0, usage_error = 1, input_error = 2, numeric_error = 3 };

/// Runs one subcommand. `args` excludes the program name.
/// Worker count for bp-scan comes from SHIFTGRAD_THREADS (0 or unset = auto).
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace shiftgrad::cli

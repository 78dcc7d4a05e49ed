#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace ggmrecon::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;

/// Runs one subcommand. `args` excludes the program name, so args[0] is the
/// subcommand. Data goes to files or `out`, diagnostics to `err`.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ggmrecon::cli

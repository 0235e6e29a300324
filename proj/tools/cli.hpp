#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigver::cli {

/// Exit statuses: 0 success, 1 usage error, 2 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one subcommand (synth | extract | train | eval | verify).
/// Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sigver::cli

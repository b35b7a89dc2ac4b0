#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zsworld::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitEmptyRetrieval = 4;
inline constexpr int kExitInternal = 1;

/// Runs the `zsworld` command line. `args` excludes the program name.
/// Reports (help text, summaries) go to `out`; failures are written to `err`
/// as a single line:
///
///   zsworld: error exit=<code> kind=<kind> message="<text>"
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal text that reads back as the same double.
std::string format_number(double v);

}  // namespace zsworld::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rffol::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitDivergence = 3;

/// Runs one command line (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`. Output files of a failed command are removed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rffol::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thickknot {

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (args[0] is the program name). Reports go to `out`
/// as JSON, errors and help to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace thickknot

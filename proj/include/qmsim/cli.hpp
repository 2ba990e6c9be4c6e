#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmsim::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Name of the environment variable pointing at a JSON constants table.
inline constexpr const char* kConstantsEnv = "QMSIM_CONSTANTS";

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kConfigError = 2 };

/// Runs one subcommand (zeno | estimate | channel | chain | rabi).
/// `args` excludes the program name. Artifacts go to `--output` files or `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace qmsim::cli

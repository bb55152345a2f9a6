#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace blgi::cli {

inline constexpr const char* kToolName = "blgi-sim";
inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumerical = 3,
  kExitBoundViolation = 4,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blgi::cli

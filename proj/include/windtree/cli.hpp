#pragma once

#include <string>
#include <vector>

namespace windtree {

inline constexpr const char* kToolName = "windtree";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,        // bad configuration or usage
  kExitNotCertified = 3,  // NotCertified, or most samples ended on a budget
  kExitInternal = 4,      // internal assertion
};

/// Runs the command line tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args);

}  // namespace windtree

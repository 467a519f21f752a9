#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gradplay::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kSolverFailure = 3,
  kNumericalFailure = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's contents.
std::string FileSha256(const std::string& path);

}  // namespace gradplay::cli

#pragma once

#include <string>
#include <vector>

namespace gradplay::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks; `deep` adds the Monte-Carlo suites.
std::vector<CheckResult> RunCheckSuite(double tol, bool deep);

}  // namespace gradplay::cli

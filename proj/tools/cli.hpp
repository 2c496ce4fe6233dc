#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chernoff::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

/// Entry point of the `chernoff` tool. Data goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Normalization, contour invariance and E V^2 = E M / (3 gamma).
std::vector<CheckResult> numeric_identity_suite(double rel_tol);

}  // namespace chernoff::cli

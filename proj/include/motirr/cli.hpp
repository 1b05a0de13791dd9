#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace motirr::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kIoFailure = 2,
  kInvalidParameters = 3,
  kContractViolation = 4,
};

/// Runs one invocation. `args` excludes the program name. Reports go to
/// `out`, diagnostics to `err`; files are written where --out points.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace motirr::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prodspace::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kMissingCache = 3,
  kValidation = 4,
};

/// Runs one command line (without the program name). PS_DATA_DIR is read
/// from the environment.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prodspace::cli

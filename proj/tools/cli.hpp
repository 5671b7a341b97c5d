#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nsmoo::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 1,
  kBudgetExhausted = 2,
  kAlgorithmFailure = 3,
};

/// Runs the command line front end; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsmoo::cli

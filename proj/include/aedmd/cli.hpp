#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aedmd::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 1,
  kBlowUp = 2,
  kDomainViolation = 3,
};

// Entry point shared by the executable and the tests. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace aedmd::cli

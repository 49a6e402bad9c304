#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aerostar::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeFailure = 2, kSelftestFailure = 3 };

// Entry point of the `aerostar` command; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aerostar::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hubbard::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalError = 3 };

/// Runs one CLI invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hubbard::cli

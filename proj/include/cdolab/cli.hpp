#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdolab::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kConfig = 2, kIndeterminate = 3, kSimulation = 4 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdolab::cli

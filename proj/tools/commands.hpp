#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ctrlk::cli {

enum Exit { kOk = 0, kInvalid = 1, kMalformed = 2 };

/// Parses the arguments (argv[0] included), runs the command and writes the
/// report to `out`, diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctrlk::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fga::cli {

// Exit statuses of the fgalgebra command.
enum ExitStatus : int {
  kOk = 0,
  kUsageOrIo = 1,
  kSignificant = 2,
  kPrecondition = 3,
};

// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace fga::cli

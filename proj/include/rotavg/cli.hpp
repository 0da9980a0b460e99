#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rotavg {

enum ExitCode : int {
  kExitOk = 0,
  kExitNotCertified = 1,
  kExitInputError = 2,
  kExitNumericalFailure = 3,
};

// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace rotavg

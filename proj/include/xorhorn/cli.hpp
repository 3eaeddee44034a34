#pragma once

#include <ostream>

namespace xorhorn {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,          // holds, or nothing to report
    kExitFound = 1,       // derivation or violation found
    kExitInconclusive = 2,
    kExitInputError = 3,
};

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xorhorn

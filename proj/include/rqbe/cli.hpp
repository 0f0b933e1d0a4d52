#pragma once

#include <ostream>

namespace rqbe::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kDivergence = 3, kInternalError = 4 };

// Entry point of the rqbe tool. Subcommands: relax, perturb, spectrum,
// oracle, bench, validate-config. Normal output goes to out, one-line
// diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rqbe::cli

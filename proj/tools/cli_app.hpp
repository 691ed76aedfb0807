// Command-line front end; `run_cli` is separate from main() so the tests can
// drive it in-process.
#pragma once

#include <iosfwd>

namespace seplab::cli {

enum ExitCode { kOk = 0, kComputationFailure = 1, kUsage = 2 };

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seplab::cli

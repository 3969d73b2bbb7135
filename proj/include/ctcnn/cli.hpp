#pragma once

#include <ostream>

namespace ctcnn {

// Exit codes of the ctcnn command.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
};

// Parses argv (argv[0] is the program name) and runs one subcommand:
// summary, train, eval, predict, gradcheck or synth.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctcnn

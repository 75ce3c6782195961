#ifndef ADJSARAH_TOOLS_CLI_HPP
#define ADJSARAH_TOOLS_CLI_HPP

#include <iosfwd>

namespace adjsarah::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kIo = 3,
  kDivergence = 4,
};

// Parses argv (argv[0] is the program name) and runs one subcommand.
// Machine-readable output goes to `out`, logs and errors to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace adjsarah::cli

#endif  // ADJSARAH_TOOLS_CLI_HPP

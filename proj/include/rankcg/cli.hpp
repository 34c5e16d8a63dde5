#pragma once

#include <iosfwd>

namespace rankcg::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kData = 3,
  kTimeLimit = 4,
};

/// Entry point behind the `rankcg` binary. Each subcommand writes one JSON
/// line followed by a short human summary to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rankcg::cli

#pragma once

#include <iosfwd>

namespace aoi_relay {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,      ///< I/O and other runtime errors
    kExitValidation = 2,   ///< bad flags or configuration
    kExitUnstable = 3,     ///< queue unstable at the requested configuration
    kExitOracleFailed = 4, ///< `validate` found a failing check
};

/// Entry point of the `aoi-relay` tool: subcommands analyze, simulate,
/// sweep and validate. Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aoi_relay

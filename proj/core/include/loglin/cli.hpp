#pragma once

namespace loglin {

/// Entry point for the command-line tool. Subcommands: fit, select, simulate,
/// check. Returns 0 on success, 1 on usage error, 2 when the solver fails to
/// converge, 3 on I/O error.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace loglin

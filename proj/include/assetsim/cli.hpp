#pragma once

#include <ostream>

namespace assetsim {

/// Subcommands: derive, fit, diagnose, critical-values, simulate, serve.
/// Returns 0 on success, 1 on invalid input, 2 on I/O failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace assetsim

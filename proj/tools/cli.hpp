#pragma once

#include <iosfwd>

namespace sipmix {

/// Runs one subcommand. Returns 0 on success, 2 on bad arguments and 1 on
/// runtime failure; diagnostics go to `err`.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sipmix

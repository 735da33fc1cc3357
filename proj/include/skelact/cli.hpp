#pragma once

#include <iosfwd>

namespace skelact {

/// Entry point for the `skelact` command line. Data goes to `out`,
/// diagnostics to `err`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace skelact

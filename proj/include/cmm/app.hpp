#pragma once

#include <iosfwd>

namespace cmm {

/// Command-line entry point. Returns the process exit code: 0 success,
/// 2 configuration error, 3 instability where stability is required,
/// 4 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cmm

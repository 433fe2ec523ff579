#pragma once

#include <iosfwd>

namespace scripttax::cli {

/// Entry point shared by the `scripttax` binary and the CLI tests. Returns
/// the process exit code: 0 success, 1 validation/parse error, 2 I/O error,
/// 3 internal invariant violation.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scripttax::cli

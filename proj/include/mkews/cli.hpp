#pragma once

#include <iosfwd>

namespace mkews {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "MKEWS_OUTPUT_DIR";

/// Runs one command line: `mkews <subcommand> [--config FILE] [--key value ...]`.
/// Returns 0 on success, 2 on a configuration error, 1 on a runtime error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mkews

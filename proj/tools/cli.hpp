#pragma once

#include <iosfwd>

namespace coupon::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

// Environment variable naming the directory that relative --out paths are
// resolved against.
inline constexpr const char* kOutputDirEnv = "COUPON_OUTPUT_DIR";

// Parses argv and runs the selected subcommand. Regular output goes to `out`
// unless --out names a file; a single-line diagnostic goes to `err` on failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coupon::cli

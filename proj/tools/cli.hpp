#pragma once

namespace irisbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line. Logs go to stderr; data only to the files named by flags.
int run(int argc, const char* const* argv);

}  // namespace irisbench::cli

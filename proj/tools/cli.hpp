#pragma once

#include <ostream>

namespace gibbsgraph::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kAssertionFailed = 1;
inline constexpr int kUsageError = 2;

/// Full command-line entry point; `out` receives results, `err` diagnostics.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gibbsgraph::cli

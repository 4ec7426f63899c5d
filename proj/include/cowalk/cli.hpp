#pragma once

#include <ostream>

namespace cowalk::cli {

/// Exit status: 0 success, 1 a check failed unexpectedly (a JSON report is
/// written), 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cowalk::cli

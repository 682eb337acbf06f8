#pragma once

#include <iosfwd>

namespace gshs::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;    // a check or an assumption failed
inline constexpr int kConfigError = 2;    // bad command line or config file
inline constexpr int kRefused = 3;        // stiffness or validation refusal without --force
inline constexpr int kRuntimeError = 4;   // numeric or I/O failure

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gshs::cli

#pragma once

#include <iosfwd>

namespace haven {

inline constexpr const char* kVersion = "0.1.0";

// Entry point of the `haven` tool. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace haven

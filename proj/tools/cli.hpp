#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vnkf::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDecode = 4;
inline constexpr int kExitInternal = 5;

// args excludes the program name. Structured results go to out, one-line
// diagnostics and progress to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vnkf::cli

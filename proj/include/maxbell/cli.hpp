#pragma once

// Command-line front end. Exit codes: 0 success / all checks pass,
// 1 verification failure, 2 usage or domain error.

#include <iosfwd>
#include <string>
#include <vector>

namespace maxbell {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maxbell

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace myerson_lab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitVerificationFailed = 3;

/// Runs the command line `args` (without the program name). Regular output
/// goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace myerson_lab

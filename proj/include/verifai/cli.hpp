#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace verifai {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

/// Runs one command line (args[0] is the program name). Results go to
/// `out`, diagnostics and usage errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace verifai

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rk::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;  // verify: some check out of tolerance
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;
inline constexpr int kDegenerate = 4;
inline constexpr int kHypothesis = 5;

/// Runs the `kaczmarz` command line. args[0] is the program name.
/// Data goes to `out` unless --out redirects it; diagnostics and summaries go
/// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rk::cli

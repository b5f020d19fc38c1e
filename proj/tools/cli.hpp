#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drs::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

/// Runs `drs <subcommand> [flags]`. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace drs::cli

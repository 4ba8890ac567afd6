#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace vsal::cli {

// Exit codes of every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

// Entry point of the `vsal` tool. args[0] is the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace vsal::cli

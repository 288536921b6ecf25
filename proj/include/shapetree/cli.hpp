#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace shapetree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (estimate, simulate, rates, assouad, vc, mde).
/// Data goes to `out` (or --output), diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shapetree::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lsl {

/// Exit codes: 0 success, 1 error, 2 computed with undecided or inconclusive
/// entries.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndecided = 2;

/// Runs one subcommand (spectrum, minind, systole, energy, gh, converge, gap).
/// `args` excludes the program name. Results go to --out or `out`; diagnostics
/// to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsl

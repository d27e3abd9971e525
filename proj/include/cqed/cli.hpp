#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cqed {

// Exit codes
inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 2;
inline constexpr int exit_numeric = 3;
inline constexpr int exit_usage = 64;

/// Parses "start:stop:count", a comma list, or a single number.
std::vector<double> parse_values(const std::string& text);

/// Runs one command line (argv[0] is the program name). Reports go to `out`,
/// progress and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cqed

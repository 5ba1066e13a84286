#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcsolve::cli {

// Exit codes.
inline constexpr int kHolds = 0;        // also: satisfiable, difftest clean
inline constexpr int kDoesNotHold = 1;  // also: unsatisfiable, difftest violations
inline constexpr int kUnknown = 2;
inline constexpr int kError = 3;

// argv[0] is the program name. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace qcsolve::cli

#pragma once

#include <string>
#include <string_view>

namespace zeroed {

/// Generalization granularity for value patterns.
///  - L1: alphanumerics -> A, any other character kept literally
///  - L2: letters -> L, digits -> D, everything else -> S
///  - L3: uppercase -> U, lowercase -> u, digits -> D, everything else -> S
/// Runs of the same class collapse to `C[len]`; L1 literals are not collapsed.
enum class PatternLevel : int { L1 = 1, L2 = 2, L3 = 3 };

/// Example: "DOe123." -> L1 "A[6].", L2 "L[3]D[3]S[1]", L3 "U[2]u[1]D[3]S[1]".
/// Non-ASCII bytes are symbols at every level.
std::string generalize_pattern(std::string_view value, PatternLevel level);

inline std::string generalize_pattern(std::string_view value, int level) {
  return generalize_pattern(value, static_cast<PatternLevel>(level));
}

}  // namespace zeroed

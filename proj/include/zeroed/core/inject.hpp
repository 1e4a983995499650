#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "zeroed/core/dataset.hpp"
#include "zeroed/core/mask.hpp"
#include "zeroed/core/rng.hpp"

namespace zeroed {

enum class ErrorType : std::uint8_t { None = 0, Missing, Typo, Pattern, Outlier, Rule };
inline constexpr std::size_t kErrorTypeCount = 6;

std::string_view to_string(ErrorType t);

/// Per-type corruption rates as fractions of all N*M cells.
struct InjectionSpec {
  double missing = 0.0;
  double typo = 0.0;
  double pattern = 0.0;
  double outlier = 0.0;
  double rule = 0.0;
  /// (determinant, dependent) attribute names used for rule violations.
  std::vector<std::pair<std::string, std::string>> rule_pairs;
  std::uint64_t seed = 0;
};

struct InjectionResult {
  Dataset dirty;
  CellMask mask;
  /// Row-major N*M error type per cell (None for untouched cells).
  std::vector<ErrorType> types;
  std::array<std::size_t, kErrorTypeCount> counts{};
};

/// Corrupts a clean table. Deterministic under spec.seed and the returned
/// mask always equals diff_mask(dirty, clean). Throws InvalidArgument on
/// invalid rates, rate sum > 1, or rule injection without rule pairs.
InjectionResult inject_errors(const Dataset& clean, const InjectionSpec& spec);

/// Individual corruption generators, shared by the injector, the augmentation
/// fallbacks and the oracle mock provider.
namespace corrupt {

/// 1-3 character edits (substitute / insert / delete); result differs from
/// the input and is never empty.
std::string typo(std::string_view value, Rng& rng);

/// Case or separator mangle whose L3 pattern is absent from `known_patterns`.
std::optional<std::string> pattern_mangle(std::string_view value,
                                          const std::unordered_set<std::string>& known_patterns, Rng& rng);

/// x10 or /10 for numeric strings; nullopt for non-numeric input.
std::optional<std::string> scale_numeric(std::string_view value, Rng& rng);

/// A token from a fixed list of unusual words that does not occur in `column`.
std::string rare_token(std::span<const std::string> column, Rng& rng);

}  // namespace corrupt

}  // namespace zeroed

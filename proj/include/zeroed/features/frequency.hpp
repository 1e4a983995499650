#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "zeroed/core/dataset.hpp"
#include "zeroed/features/pattern.hpp"

namespace zeroed {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/// Dictionary encoding of one column: code per row plus per-code counts.
/// Codes follow first-occurrence order.
struct ColumnCodes {
  std::vector<std::uint32_t> codes;
  std::vector<std::string> domain;
  std::vector<std::uint32_t> counts;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> lookup;

  static ColumnCodes encode(std::span<const std::string> values);
  /// Occurrences of `value` in the column (0 when absent).
  std::uint32_t count_of(std::string_view value) const;
  std::size_t cardinality() const noexcept { return domain.size(); }
};

/// Precomputed counts behind the statistical and pattern features:
/// value codes, L1-L3 pattern codes, and pairwise co-occurrence counts.
class FrequencyIndex {
 public:
  explicit FrequencyIndex(const Dataset& ds);

  const Dataset& dataset() const noexcept { return *ds_; }
  std::size_t num_rows() const noexcept { return ds_->num_rows(); }
  std::size_t num_attributes() const noexcept { return ds_->num_attributes(); }

  const ColumnCodes& values(std::size_t j) const { return values_.at(j); }
  const ColumnCodes& patterns(std::size_t j, PatternLevel level) const {
    return patterns_.at(j)[static_cast<int>(level) - 1];
  }

  /// Rows where attribute q holds code_q and attribute j holds code_j.
  std::uint32_t pair_count(std::size_t q, std::size_t j, std::uint32_t code_q, std::uint32_t code_j) const;

 private:
  const Dataset* ds_;
  std::vector<ColumnCodes> values_;
  std::vector<std::array<ColumnCodes, 3>> patterns_;
  // Unordered pair (lo, hi) -> map keyed (code_lo << 32 | code_hi).
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> pairs_;
};

/// f_stat for one cell: M frequencies. Entry j is the value frequency
/// count(D[i,j]) / N; entry q != j is the vicinity frequency
/// count(D[i,q], D[i,j]) / count(D[i,q]).
struct StatFeature {
  std::vector<double> freqs;
};

/// f_pat for one cell: fraction of the column sharing its L1/L2/L3 pattern.
struct PatternFeature {
  std::array<double, 3> freqs{};
};

StatFeature stat_frequencies(const FrequencyIndex& index, std::size_t i, std::size_t j);
StatFeature stat_frequencies(const Dataset& ds, std::size_t i, std::size_t j);

PatternFeature pattern_frequencies(const FrequencyIndex& index, std::size_t i, std::size_t j);
PatternFeature pattern_frequencies(const Dataset& ds, std::size_t i, std::size_t j);

/// Frequencies for a hypothetical value replacing cell (i, j): the column is
/// taken to be the original column with row i's value swapped for `variant`.
StatFeature stat_frequencies_for_variant(const FrequencyIndex& index, std::size_t i, std::size_t j,
                                         std::string_view variant);
PatternFeature pattern_frequencies_for_variant(const FrequencyIndex& index, std::size_t i, std::size_t j,
                                               std::string_view variant);

}  // namespace zeroed

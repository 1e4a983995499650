#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "zeroed/criteria/criterion.hpp"
#include "zeroed/features/embedding.hpp"
#include "zeroed/features/feature_matrix.hpp"
#include "zeroed/features/frequency.hpp"
#include "zeroed/kernels/exec.hpp"

namespace zeroed {

/// Segment layout of one cell's base vector: stat (M), pattern (3),
/// semantic (d), criteria bits zero-padded to the widest criterion set.
struct BaseLayout {
  std::size_t attrs = 0;
  std::size_t sem_dim = 0;
  std::size_t criteria_width = 0;

  std::size_t stat_offset() const noexcept { return 0; }
  std::size_t pattern_offset() const noexcept { return attrs; }
  std::size_t semantic_offset() const noexcept { return attrs + 3; }
  std::size_t criteria_offset() const noexcept { return attrs + 3 + sem_dim; }
  std::size_t intrinsic_width() const noexcept { return attrs + 3 + sem_dim; }
  std::size_t width() const noexcept { return intrinsic_width() + criteria_width; }

  friend bool operator==(const BaseLayout&, const BaseLayout&) = default;
};

/// N x (M + 3 + d): stat, pattern and semantic features of attribute j.
FeatureMatrix intrinsic_features(const FrequencyIndex& index, const EmbeddingTable& table, std::size_t j,
                                 Exec exec = Exec::Parallel);

/// Criteria bits of attribute j, N x |set|.
FeatureMatrix criteria_features(const criteria::CriterionSet& set, const Dataset& ds, std::size_t j,
                                Exec exec = Exec::Parallel);

/// intrinsic ⊕ bits, with the bits padded to layout.criteria_width.
FeatureMatrix compose_base(const FeatureMatrix& intrinsic, const FeatureMatrix& criteria_bits,
                           const BaseLayout& layout);

/// Row i = base_j(i) ⊕ base_q1(i) ⊕ ... ⊕ base_qk(i). Width (1 + k) x base width.
FeatureMatrix assemble_unified(std::span<const FeatureMatrix> bases, std::size_t j,
                               std::span<const std::size_t> correlates);

/// Base vector of cell (i, j) as if `variant` replaced its value. Frequencies
/// are taken against the original columns with that one substitution.
std::vector<float> variant_base_row(const FrequencyIndex& index, const EmbeddingTable& table,
                                    const criteria::CriterionSet& set, const BaseLayout& layout, std::size_t i,
                                    std::size_t j, std::string_view variant);

/// Unified row for a variant: its base vector followed by the correlates'
/// unchanged base vectors at row i.
std::vector<float> variant_unified_row(std::span<const float> variant_base, std::span<const FeatureMatrix> bases,
                                       std::size_t i, std::span<const std::size_t> correlates);

}  // namespace zeroed

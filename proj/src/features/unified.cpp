#include "zeroed/features/unified.hpp"

#include <algorithm>

#include "zeroed/core/error.hpp"
#include "zeroed/kernels/kernels.hpp"

namespace zeroed {

FeatureMatrix intrinsic_features(const FrequencyIndex& index, const EmbeddingTable& table, std::size_t j, Exec exec) {
  const bool par = exec == Exec::Parallel;
  const auto freq = par ? kernels::parallel::frequency_block(index, j) : kernels::serial::frequency_block(index, j);
  const auto sem = par ? kernels::parallel::embedding_block(index.values(j), table)
                       : kernels::serial::embedding_block(index.values(j), table);
  FeatureMatrix out(index.num_rows(), freq.cols() + sem.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    std::copy(freq.row(i).begin(), freq.row(i).end(), row.begin());
    std::copy(sem.row(i).begin(), sem.row(i).end(), row.begin() + static_cast<std::ptrdiff_t>(freq.cols()));
  }
  return out;
}

FeatureMatrix criteria_features(const criteria::CriterionSet& set, const Dataset& ds, std::size_t j, Exec exec) {
  return exec == Exec::Parallel ? kernels::parallel::criteria_block(set, ds, j)
                                : kernels::serial::criteria_block(set, ds, j);
}

FeatureMatrix compose_base(const FeatureMatrix& intrinsic, const FeatureMatrix& criteria_bits,
                           const BaseLayout& layout) {
  if (intrinsic.cols() != layout.intrinsic_width()) throw ShapeError("intrinsic features do not match the layout");
  if (criteria_bits.rows() != intrinsic.rows() && !(criteria_bits.cols() == 0 && criteria_bits.rows() == 0)) {
    throw ShapeError("criteria features have a different row count");
  }
  if (criteria_bits.cols() > layout.criteria_width) throw ShapeError("criteria set wider than the layout");
  FeatureMatrix out(intrinsic.rows(), layout.width());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    std::copy(intrinsic.row(i).begin(), intrinsic.row(i).end(), row.begin());
    if (criteria_bits.cols() > 0) {
      std::copy(criteria_bits.row(i).begin(), criteria_bits.row(i).end(),
                row.begin() + static_cast<std::ptrdiff_t>(layout.criteria_offset()));
    }
  }
  return out;
}

FeatureMatrix assemble_unified(std::span<const FeatureMatrix> bases, std::size_t j,
                               std::span<const std::size_t> correlates) {
  if (j >= bases.size()) throw InvalidArgument("attribute index out of range");
  const std::size_t n = bases[j].rows();
  const std::size_t w = bases[j].cols();
  for (const auto q : correlates) {
    if (q >= bases.size()) throw InvalidArgument("correlated attribute index out of range");
    if (bases[q].rows() != n || bases[q].cols() != w) throw ShapeError("base features of correlates differ in shape");
  }
  FeatureMatrix out(n, w * (1 + correlates.size()));
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    std::copy(bases[j].row(i).begin(), bases[j].row(i).end(), row.begin());
    for (std::size_t s = 0; s < correlates.size(); ++s) {
      const auto src = bases[correlates[s]].row(i);
      std::copy(src.begin(), src.end(), row.begin() + static_cast<std::ptrdiff_t>((s + 1) * w));
    }
  }
  return out;
}

std::vector<float> variant_base_row(const FrequencyIndex& index, const EmbeddingTable& table,
                                    const criteria::CriterionSet& set, const BaseLayout& layout, std::size_t i,
                                    std::size_t j, std::string_view variant) {
  if (set.size() > layout.criteria_width) throw ShapeError("criteria set wider than the layout");
  std::vector<float> out(layout.width(), 0.0f);
  const auto stat = stat_frequencies_for_variant(index, i, j, variant);
  const auto pat = pattern_frequencies_for_variant(index, i, j, variant);
  for (std::size_t q = 0; q < layout.attrs; ++q) out[layout.stat_offset() + q] = static_cast<float>(stat.freqs[q]);
  for (std::size_t l = 0; l < 3; ++l) out[layout.pattern_offset() + l] = static_cast<float>(pat.freqs[l]);
  const auto sem = embed_value(variant, table);
  std::copy(sem.vec.begin(), sem.vec.end(), out.begin() + static_cast<std::ptrdiff_t>(layout.semantic_offset()));
  const criteria::CellContext ctx{index.dataset(), i, j, variant};
  const auto bits = criteria::feature_vector(set, ctx);
  for (std::size_t t = 0; t < bits.size(); ++t) out[layout.criteria_offset() + t] = bits[t];
  return out;
}

std::vector<float> variant_unified_row(std::span<const float> variant_base, std::span<const FeatureMatrix> bases,
                                       std::size_t i, std::span<const std::size_t> correlates) {
  std::vector<float> out(variant_base.begin(), variant_base.end());
  for (const auto q : correlates) {
    const auto src = bases[q].row(i);
    if (src.size() != variant_base.size()) throw ShapeError("base features of correlates differ in width");
    out.insert(out.end(), src.begin(), src.end());
  }
  return out;
}

}  // namespace zeroed

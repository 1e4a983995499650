#include "items.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/features/nmi.hpp"

namespace zeroed::kernels::parallel {

namespace {

std::ptrdiff_t as_signed(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }

}  // namespace

FeatureMatrix frequency_block(const FrequencyIndex& index, std::size_t j) {
  const std::size_t n = index.num_rows();
  FeatureMatrix out(n, index.num_attributes() + 3);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < as_signed(n); ++i) {
    detail::frequency_row(index, static_cast<std::size_t>(i), j, out.row(static_cast<std::size_t>(i)));
  }
  return out;
}

FeatureMatrix embedding_block(const ColumnCodes& column, const EmbeddingTable& table) {
  const std::size_t d = table.dim();
  std::vector<SemanticFeature> per_value(column.cardinality());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t c = 0; c < as_signed(per_value.size()); ++c) {
    per_value[static_cast<std::size_t>(c)] = embed_value(column.domain[static_cast<std::size_t>(c)], table);
  }
  FeatureMatrix out(column.codes.size(), d);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < as_signed(column.codes.size()); ++i) {
    const auto& v = per_value[column.codes[static_cast<std::size_t>(i)]].vec;
    std::copy(v.begin(), v.end(), out.row(static_cast<std::size_t>(i)).begin());
  }
  return out;
}

FeatureMatrix criteria_block(const criteria::CriterionSet& set, const Dataset& ds, std::size_t j) {
  FeatureMatrix out(ds.num_rows(), set.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < as_signed(ds.num_rows()); ++i) {
    detail::criteria_row(set, ds, static_cast<std::size_t>(i), j, out.row(static_cast<std::size_t>(i)));
  }
  return out;
}

std::vector<double> nmi_matrix(const FrequencyIndex& index) {
  const std::size_t m = index.num_attributes();
  const auto pairs = detail::upper_pairs(m);
  std::vector<double> values(pairs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t p = 0; p < as_signed(pairs.size()); ++p) {
    const auto& [a, b] = pairs[static_cast<std::size_t>(p)];
    values[static_cast<std::size_t>(p)] = nmi(index.values(a), index.values(b));
  }
  return detail::mirror_nmi(m, pairs, values, index);
}

std::size_t assign_nearest(const FeatureMatrix& points, std::span<const double> centroids, std::size_t s,
                           std::vector<std::uint32_t>& assignments) {
  if (centroids.size() != s * points.cols()) throw ShapeError("centroid buffer has wrong size");
  assignments.resize(points.rows(), 0);
  std::size_t changed = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed)
  for (std::ptrdiff_t i = 0; i < as_signed(points.rows()); ++i) {
    const auto row = static_cast<std::size_t>(i);
    const auto c = detail::nearest(points.row(row), centroids, s);
    if (c != assignments[row]) ++changed;
    assignments[row] = c;
  }
  return changed;
}

std::vector<double> mlp_probabilities(const MlpWeights& w, const FeatureMatrix& x) {
  if (static_cast<Eigen::Index>(x.cols()) != w.w1.cols()) throw ShapeError("feature width does not match model");
  std::vector<double> out(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < as_signed(x.rows()); ++i) {
    out[static_cast<std::size_t>(i)] = mlp_row(w, x.row(static_cast<std::size_t>(i)));
  }
  return out;
}

}  // namespace zeroed::kernels::parallel

#include "items.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/features/nmi.hpp"

namespace zeroed::kernels::serial {

FeatureMatrix frequency_block(const FrequencyIndex& index, std::size_t j) {
  const std::size_t n = index.num_rows();
  FeatureMatrix out(n, index.num_attributes() + 3);
  for (std::size_t i = 0; i < n; ++i) detail::frequency_row(index, i, j, out.row(i));
  return out;
}

FeatureMatrix embedding_block(const ColumnCodes& column, const EmbeddingTable& table) {
  const std::size_t d = table.dim();
  std::vector<SemanticFeature> per_value(column.cardinality());
  for (std::size_t c = 0; c < per_value.size(); ++c) per_value[c] = embed_value(column.domain[c], table);
  FeatureMatrix out(column.codes.size(), d);
  for (std::size_t i = 0; i < column.codes.size(); ++i) {
    const auto& v = per_value[column.codes[i]].vec;
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

FeatureMatrix criteria_block(const criteria::CriterionSet& set, const Dataset& ds, std::size_t j) {
  FeatureMatrix out(ds.num_rows(), set.size());
  for (std::size_t i = 0; i < ds.num_rows(); ++i) detail::criteria_row(set, ds, i, j, out.row(i));
  return out;
}

std::vector<double> nmi_matrix(const FrequencyIndex& index) {
  const std::size_t m = index.num_attributes();
  const auto pairs = detail::upper_pairs(m);
  std::vector<double> values(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    values[p] = nmi(index.values(pairs[p].first), index.values(pairs[p].second));
  }
  return detail::mirror_nmi(m, pairs, values, index);
}

std::size_t assign_nearest(const FeatureMatrix& points, std::span<const double> centroids, std::size_t s,
                           std::vector<std::uint32_t>& assignments) {
  if (centroids.size() != s * points.cols()) throw ShapeError("centroid buffer has wrong size");
  assignments.resize(points.rows(), 0);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto c = detail::nearest(points.row(i), centroids, s);
    if (c != assignments[i]) ++changed;
    assignments[i] = c;
  }
  return changed;
}

std::vector<double> mlp_probabilities(const MlpWeights& w, const FeatureMatrix& x) {
  if (static_cast<Eigen::Index>(x.cols()) != w.w1.cols()) throw ShapeError("feature width does not match model");
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = mlp_row(w, x.row(i));
  return out;
}

}  // namespace zeroed::kernels::serial

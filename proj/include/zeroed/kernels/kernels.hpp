#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zeroed/core/dataset.hpp"
#include "zeroed/criteria/criterion.hpp"
#include "zeroed/features/embedding.hpp"
#include "zeroed/features/feature_matrix.hpp"
#include "zeroed/features/frequency.hpp"

// Hot loops of the pipeline in two flavours. `serial` is the reference;
// `parallel` splits the same per-item work across OpenMP threads and must
// return bit-identical results (every output element is computed by exactly
// the same sequence of floating-point operations in both).

namespace zeroed::kernels {

/// Weights of a one-hidden-layer perceptron, row-major as in y = W2 relu(W1 x + b1) + b2.
struct MlpWeights {
  Eigen::MatrixXd w1;  // H x D
  Eigen::VectorXd b1;  // H
  Eigen::RowVectorXd w2;  // 1 x H
  double b2 = 0.0;
};

// frequency_block:   N x (M + 3), f_stat then f_pat for every cell of attribute j.
// embedding_block:   N x d, f_sem per row, computed once per distinct value.
// criteria_block:    N x |set|, criteria bits of every cell of attribute j.
// nmi_matrix:        M x M symmetric NMI matrix, row-major.
// assign_nearest:    nearest centroid (s x D, row-major) per point, ties to the
//                    lowest index; returns how many assignments changed.
// mlp_probabilities: logistic output per row.

namespace serial {
FeatureMatrix frequency_block(const FrequencyIndex& index, std::size_t j);
FeatureMatrix embedding_block(const ColumnCodes& column, const EmbeddingTable& table);
FeatureMatrix criteria_block(const criteria::CriterionSet& set, const Dataset& ds, std::size_t j);
std::vector<double> nmi_matrix(const FrequencyIndex& index);
std::size_t assign_nearest(const FeatureMatrix& points, std::span<const double> centroids, std::size_t s,
                           std::vector<std::uint32_t>& assignments);
std::vector<double> mlp_probabilities(const MlpWeights& w, const FeatureMatrix& x);
}  // namespace serial

namespace parallel {
FeatureMatrix frequency_block(const FrequencyIndex& index, std::size_t j);
FeatureMatrix embedding_block(const ColumnCodes& column, const EmbeddingTable& table);
FeatureMatrix criteria_block(const criteria::CriterionSet& set, const Dataset& ds, std::size_t j);
std::vector<double> nmi_matrix(const FrequencyIndex& index);
std::size_t assign_nearest(const FeatureMatrix& points, std::span<const double> centroids, std::size_t s,
                           std::vector<std::uint32_t>& assignments);
std::vector<double> mlp_probabilities(const MlpWeights& w, const FeatureMatrix& x);
}  // namespace parallel

/// Squared Euclidean distance between a float row and a double centroid.
double squared_distance(std::span<const float> x, std::span<const double> c) noexcept;

/// Logistic output of the MLP for one input row.
double mlp_row(const MlpWeights& w, std::span<const float> x);

}  // namespace zeroed::kernels

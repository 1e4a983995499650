#include "items.hpp"

#include <cmath>

#include "zeroed/features/nmi.hpp"

namespace zeroed::kernels {

namespace detail {

void frequency_row(const FrequencyIndex& index, std::size_t i, std::size_t j, std::span<float> out) {
  const auto stat = stat_frequencies(index, i, j);
  const auto pat = pattern_frequencies(index, i, j);
  const std::size_t m = stat.freqs.size();
  for (std::size_t q = 0; q < m; ++q) out[q] = static_cast<float>(stat.freqs[q]);
  for (std::size_t l = 0; l < 3; ++l) out[m + l] = static_cast<float>(pat.freqs[l]);
}

void criteria_row(const criteria::CriterionSet& set, const Dataset& ds, std::size_t i, std::size_t j,
                  std::span<float> out) {
  const criteria::CellContext ctx{ds, i, j, std::nullopt};
  for (std::size_t t = 0; t < set.size(); ++t) out[t] = criteria::evaluate(*set.criteria[t].ast, ctx) ? 1.0f : 0.0f;
}

std::uint32_t nearest(std::span<const float> x, std::span<const double> centroids, std::size_t s) {
  const std::size_t d = x.size();
  std::uint32_t best = 0;
  double best_dist = squared_distance(x, centroids.subspan(0, d));
  for (std::size_t c = 1; c < s; ++c) {
    const double dist = squared_distance(x, centroids.subspan(c * d, d));
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

std::vector<std::pair<std::size_t, std::size_t>> upper_pairs(std::size_t m) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) pairs.emplace_back(a, b);
  }
  return pairs;
}

std::vector<double> mirror_nmi(std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const std::vector<double>& values, const FrequencyIndex& index) {
  std::vector<double> matrix(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    // Self-information normalizes to 1 unless the column is constant.
    matrix[a * m + a] = index.values(a).cardinality() > 1 ? 1.0 : 0.0;
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [a, b] = pairs[p];
    matrix[a * m + b] = values[p];
    matrix[b * m + a] = values[p];
  }
  return matrix;
}

}  // namespace detail

double squared_distance(std::span<const float> x, std::span<const double> c) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = static_cast<double>(x[k]) - c[k];
    sum += diff * diff;
  }
  return sum;
}

double mlp_row(const MlpWeights& w, std::span<const float> x) {
  const Eigen::VectorXd input = Eigen::Map<const Eigen::VectorXf>(x.data(), static_cast<Eigen::Index>(x.size()))
                                    .cast<double>();
  const Eigen::VectorXd hidden = (w.w1 * input + w.b1).cwiseMax(0.0);
  const double z = w.w2.transpose().dot(hidden) + w.b2;
  return 1.0 / (1.0 + std::exp(-z));
}

}  // namespace zeroed::kernels

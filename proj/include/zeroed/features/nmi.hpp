#pragma once

#include <cstddef>
#include <vector>

#include "zeroed/core/dataset.hpp"
#include "zeroed/features/frequency.hpp"
#include "zeroed/kernels/exec.hpp"

namespace zeroed {

/// Normalized mutual information I(a;b) / sqrt(H(a) H(b)) with plug-in
/// (frequency) probability estimates and natural logs. Defined as 0 when
/// either attribute is constant. Result is clamped to [0, 1].
double nmi(const ColumnCodes& a, const ColumnCodes& b);
double nmi(const Dataset& ds, std::size_t a, std::size_t b);

/// Symmetric M x M NMI matrix plus the per-attribute ranking of the others
/// (descending NMI, ties by lower attribute index).
struct CorrelationMap {
  std::size_t attrs = 0;
  std::vector<double> matrix;
  std::vector<std::vector<std::size_t>> ranked;

  double at(std::size_t a, std::size_t b) const { return matrix[a * attrs + b]; }
};

CorrelationMap build_correlation_map(const FrequencyIndex& index, Exec exec = Exec::Parallel);

/// Ranking over an explicit matrix (used when the matrix is loaded from disk).
CorrelationMap correlation_map_from_matrix(std::size_t attrs, std::vector<double> matrix);

/// The k attributes (excluding a) with the highest NMI to a.
/// Throws InvalidArgument when k > M - 1.
std::vector<std::size_t> correlated_attributes(const CorrelationMap& cm, std::size_t a, std::size_t k);

}  // namespace zeroed

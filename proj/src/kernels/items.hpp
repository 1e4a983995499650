#pragma once

// Per-item work shared by the serial and OpenMP kernels, so both paths run
// identical floating-point sequences.

#include <span>

#include "zeroed/kernels/kernels.hpp"

namespace zeroed::kernels::detail {

void frequency_row(const FrequencyIndex& index, std::size_t i, std::size_t j, std::span<float> out);

void criteria_row(const criteria::CriterionSet& set, const Dataset& ds, std::size_t i, std::size_t j,
                  std::span<float> out);

/// Index of the nearest centroid, ties to the lowest index.
std::uint32_t nearest(std::span<const float> x, std::span<const double> centroids, std::size_t s);

/// Attribute pairs (a < b) of an M-attribute table in row-major order.
std::vector<std::pair<std::size_t, std::size_t>> upper_pairs(std::size_t m);

std::vector<double> mirror_nmi(std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const std::vector<double>& values, const FrequencyIndex& index);

}  // namespace zeroed::kernels::detail

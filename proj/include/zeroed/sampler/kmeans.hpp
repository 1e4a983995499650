#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "zeroed/features/feature_matrix.hpp"
#include "zeroed/kernels/exec.hpp"

namespace zeroed {

/// Clusters per attribute: max(2, round(n_rows * label_rate)), capped at n_rows.
/// Throws InvalidArgument unless 0 < label_rate <= 1.
std::size_t cluster_budget(std::size_t n_rows, double label_rate);

struct ClusterModel {
  std::size_t s = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> assignments;  // one per row, in [0, s)
  std::vector<double> centroids;           // s x dim, row-major
  std::vector<double> sse_history;         // within-cluster SSE after each centroid update
  std::size_t iterations = 0;
  bool converged = false;

  std::span<const double> centroid(std::size_t c) const { return {centroids.data() + c * dim, dim}; }
  std::vector<std::vector<std::size_t>> members() const;
};

/// k-means++ seeding, then Lloyd iterations until the assignment is stable
/// (at most 100). An empty cluster takes the point farthest from its
/// centroid among clusters with more than one member.
/// Throws InvalidArgument if s == 0 or s > rows, or on non-finite input.
ClusterModel cluster_attribute(const FeatureMatrix& feats, std::size_t s, std::uint64_t seed,
                               Exec exec = Exec::Parallel);

/// Sum of squared distances of each point to its assigned centroid.
double within_cluster_sse(const FeatureMatrix& feats, std::span<const std::uint32_t> assignments,
                          std::span<const double> centroids);

/// Per cluster, the member nearest its centroid (ties to the lower row).
std::vector<std::size_t> select_centroids(const ClusterModel& model, const FeatureMatrix& feats);

/// Assignments as raw uint32 `<base>.u32` plus a JSON sidecar with s, dim,
/// seed, SSE history and centroids.
void save_cluster_model(const std::filesystem::path& base, const ClusterModel& model);
ClusterModel load_cluster_model(const std::filesystem::path& base);

}  // namespace zeroed

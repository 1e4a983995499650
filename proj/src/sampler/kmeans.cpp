#include "zeroed/sampler/kmeans.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "zeroed/core/error.hpp"
#include "zeroed/core/files.hpp"
#include "zeroed/core/rng.hpp"
#include "zeroed/kernels/kernels.hpp"

namespace zeroed {

namespace {

constexpr std::size_t kMaxIterations = 100;
constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

void copy_point(const FeatureMatrix& feats, std::size_t i, std::vector<double>& centroids, std::size_t c) {
  const auto row = feats.row(i);
  for (std::size_t k = 0; k < row.size(); ++k) centroids[c * row.size() + k] = row[k];
}

std::vector<double> kmeanspp_init(const FeatureMatrix& feats, std::size_t s, Rng& rng) {
  const std::size_t n = feats.rows();
  const std::size_t d = feats.cols();
  std::vector<double> centroids(s * d, 0.0);
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  copy_point(feats, first, centroids, 0);
  chosen[first] = true;

  std::vector<double> best(n);
  for (std::size_t i = 0; i < n; ++i) best[i] = kernels::squared_distance(feats.row(i), {centroids.data(), d});

  for (std::size_t c = 1; c < s; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += best[i];
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.unit() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (best[i] <= 0.0) continue;
        acc += best[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      // Every point coincides with a chosen centroid: pick any unused row.
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) unused.push_back(i);
      }
      pick = unused[static_cast<std::size_t>(rng.below(unused.size()))];
    }
    copy_point(feats, pick, centroids, c);
    chosen[pick] = true;
    const std::span<const double> cen(centroids.data() + c * d, d);
    for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], kernels::squared_distance(feats.row(i), cen));
  }
  return centroids;
}

// Moves the farthest point of a multi-member cluster into each empty cluster.
void repair_empty(const FeatureMatrix& feats, std::size_t s, std::vector<std::uint32_t>& assign,
                  std::vector<double>& centroids) {
  const std::size_t d = feats.cols();
  std::vector<std::size_t> counts(s, 0);
  for (const auto a : assign) ++counts[a];
  for (std::size_t c = 0; c < s; ++c) {
    if (counts[c] > 0) continue;
    std::size_t far = feats.rows();
    double far_dist = -1.0;
    for (std::size_t i = 0; i < feats.rows(); ++i) {
      if (counts[assign[i]] < 2) continue;
      const double dist = kernels::squared_distance(feats.row(i), {centroids.data() + assign[i] * d, d});
      if (dist > far_dist) {
        far_dist = dist;
        far = i;
      }
    }
    --counts[assign[far]];
    assign[far] = static_cast<std::uint32_t>(c);
    counts[c] = 1;
    copy_point(feats, far, centroids, c);
  }
}

void update_means(const FeatureMatrix& feats, std::size_t s, std::span<const std::uint32_t> assign,
                  std::vector<double>& centroids) {
  const std::size_t d = feats.cols();
  std::vector<double> sums(s * d, 0.0);
  std::vector<std::size_t> counts(s, 0);
  for (std::size_t i = 0; i < feats.rows(); ++i) {
    const auto row = feats.row(i);
    const std::size_t c = assign[i];
    ++counts[c];
    for (std::size_t k = 0; k < d; ++k) sums[c * d + k] += row[k];
  }
  for (std::size_t c = 0; c < s; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t k = 0; k < d; ++k) centroids[c * d + k] = sums[c * d + k] / static_cast<double>(counts[c]);
  }
}

}  // namespace

std::size_t cluster_budget(std::size_t n_rows, double label_rate) {
  if (!(label_rate > 0.0 && label_rate <= 1.0)) throw InvalidArgument("label rate must lie in (0, 1]");
  const auto s = static_cast<std::size_t>(std::llround(static_cast<double>(n_rows) * label_rate));
  return std::min(std::max<std::size_t>(2, s), n_rows);
}

std::vector<std::vector<std::size_t>> ClusterModel::members() const {
  std::vector<std::vector<std::size_t>> out(s);
  for (std::size_t i = 0; i < assignments.size(); ++i) out[assignments[i]].push_back(i);
  return out;
}

double within_cluster_sse(const FeatureMatrix& feats, std::span<const std::uint32_t> assignments,
                          std::span<const double> centroids) {
  const std::size_t d = feats.cols();
  double sse = 0.0;
  for (std::size_t i = 0; i < feats.rows(); ++i) {
    sse += kernels::squared_distance(feats.row(i), centroids.subspan(assignments[i] * d, d));
  }
  return sse;
}

ClusterModel cluster_attribute(const FeatureMatrix& feats, std::size_t s, std::uint64_t seed, Exec exec) {
  const std::size_t n = feats.rows();
  if (s == 0 || s > n) throw InvalidArgument("cluster count must lie in [1, rows]");
  for (const float v : feats.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
  }
  ClusterModel model;
  model.s = s;
  model.dim = feats.cols();
  model.seed = seed;
  Rng rng(seed);
  model.centroids = kmeanspp_init(feats, s, rng);
  model.assignments.assign(n, kUnassigned);

  std::vector<std::uint32_t> previous;
  for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
    previous = model.assignments;
    if (exec == Exec::Parallel) {
      kernels::parallel::assign_nearest(feats, model.centroids, s, model.assignments);
    } else {
      kernels::serial::assign_nearest(feats, model.centroids, s, model.assignments);
    }
    repair_empty(feats, s, model.assignments, model.centroids);
    model.iterations = iter + 1;
    if (model.assignments == previous) {
      model.converged = true;
      break;
    }
    update_means(feats, s, model.assignments, model.centroids);
    model.sse_history.push_back(within_cluster_sse(feats, model.assignments, model.centroids));
  }
  return model;
}

std::vector<std::size_t> select_centroids(const ClusterModel& model, const FeatureMatrix& feats) {
  if (feats.rows() != model.assignments.size() || feats.cols() != model.dim) {
    throw ShapeError("features do not match the cluster model");
  }
  std::vector<std::size_t> best(model.s, feats.rows());
  std::vector<double> best_dist(model.s, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < feats.rows(); ++i) {
    const std::size_t c = model.assignments[i];
    const double dist = kernels::squared_distance(feats.row(i), model.centroid(c));
    if (dist < best_dist[c]) {
      best_dist[c] = dist;
      best[c] = i;
    }
  }
  return best;
}

void save_cluster_model(const std::filesystem::path& base, const ClusterModel& model) {
  write_bytes_atomic(with_suffix(base, ".u32"),
                     std::span<const char>(reinterpret_cast<const char*>(model.assignments.data()),
                                           model.assignments.size() * sizeof(std::uint32_t)));
  nlohmann::ordered_json side;
  side["rows"] = model.assignments.size();
  side["s"] = model.s;
  side["dim"] = model.dim;
  side["seed"] = model.seed;
  side["iterations"] = model.iterations;
  side["converged"] = model.converged;
  side["sse_history"] = model.sse_history;
  side["centroids"] = model.centroids;
  write_file_atomic(with_suffix(base, ".json"), side.dump() + "\n");
}

ClusterModel load_cluster_model(const std::filesystem::path& base) {
  const auto side = nlohmann::json::parse(read_file(with_suffix(base, ".json")));
  ClusterModel m;
  m.s = side.at("s").get<std::size_t>();
  m.dim = side.at("dim").get<std::size_t>();
  m.seed = side.at("seed").get<std::uint64_t>();
  m.iterations = side.at("iterations").get<std::size_t>();
  m.converged = side.at("converged").get<bool>();
  m.sse_history = side.at("sse_history").get<std::vector<double>>();
  m.centroids = side.at("centroids").get<std::vector<double>>();
  const auto rows = side.at("rows").get<std::size_t>();
  const std::string bytes = read_file(with_suffix(base, ".u32"));
  if (bytes.size() != rows * sizeof(std::uint32_t)) throw IoError("truncated assignment file for " + base.string());
  m.assignments.resize(rows);
  std::memcpy(m.assignments.data(), bytes.data(), bytes.size());
  for (const auto a : m.assignments) {
    if (a >= m.s) throw IoError("assignment out of range in " + base.string());
  }
  return m;
}

}  // namespace zeroed

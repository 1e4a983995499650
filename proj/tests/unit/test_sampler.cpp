#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles/brute_force.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/sampler/kmeans.hpp"

using namespace zeroed;

namespace {

FeatureMatrix points(std::initializer_list<std::initializer_list<float>> rows) {
  FeatureMatrix m;
  for (const auto& r : rows) m.append_row(std::vector<float>(r));
  return m;
}

std::vector<double> member_mean(const FeatureMatrix& x, const std::vector<std::size_t>& members) {
  std::vector<double> c(x.cols(), 0.0);
  for (const auto i : members) {
    for (std::size_t k = 0; k < x.cols(); ++k) c[k] += x(i, k);
  }
  for (auto& v : c) v /= double(members.size());
  return c;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("cluster budget") {
  CHECK(cluster_budget(1000, 0.05) == 50);
  CHECK(cluster_budget(10, 0.05) == 2);
  CHECK(cluster_budget(5, 1.0) == 5);
  CHECK(cluster_budget(1, 0.5) == 1);
  CHECK_THROWS_AS(cluster_budget(10, 0.0), InvalidArgument);
  CHECK_THROWS_AS(cluster_budget(10, 1.5), InvalidArgument);
}

TEST_CASE("two near pairs form the optimal two-partition") {
  const auto x = points({{0, 0}, {0, 1}, {10, 10}, {10, 11}});
  std::vector<int> best;
  const double best_sse = oracle::best_two_partition(x, &best);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = cluster_attribute(x, 2, seed);
    CHECK(m.assignments[0] == m.assignments[1]);
    CHECK(m.assignments[2] == m.assignments[3]);
    CHECK(m.assignments[0] != m.assignments[2]);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK((m.assignments[i] == m.assignments[0]) == (best[i] == best[0]));
    }
    CHECK(within_cluster_sse(x, m.assignments, m.centroids) == doctest::Approx(best_sse));
  }
}

TEST_CASE("one cluster centers on the mean; s = N gives singletons") {
  const auto x = points({{1, 2}, {3, 4}, {5, 9}});
  const auto one = cluster_attribute(x, 1, 0);
  CHECK(one.centroids[0] == doctest::Approx(3.0));
  CHECK(one.centroids[1] == doctest::Approx(5.0));
  const auto all = cluster_attribute(x, 3, 0);
  std::set<std::uint32_t> distinct(all.assignments.begin(), all.assignments.end());
  CHECK(distinct.size() == 3);
  CHECK_THROWS_AS(cluster_attribute(x, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(cluster_attribute(x, 4, 0), InvalidArgument);
}

TEST_CASE("centroid sample tie goes to the lower row") {
  // One cluster {0, 10} in 1-D: centroid 5, both points at distance 5.
  const auto x = points({{0}, {10}});
  const auto m = cluster_attribute(x, 1, 3);
  CHECK(select_centroids(m, x) == std::vector<std::size_t>{0});
  ClusterModel single;
  single.s = 1;
  single.dim = 1;
  single.assignments = {0};
  single.centroids = {42.0};
  CHECK(select_centroids(single, points({{7}})) == std::vector<std::size_t>{0});
}

TEST_CASE("three-point cluster matches a linear scan") {
  const auto x = points({{0, 0}, {4, 0}, {1, 3}});
  const auto m = cluster_attribute(x, 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (oracle::dist2(x, i, {m.centroids[0], m.centroids[1]}) < oracle::dist2(x, best, {m.centroids[0], m.centroids[1]})) best = i;
  }
  CHECK(select_centroids(m, x) == std::vector<std::size_t>{best});
}

TEST_CASE("k-means invariants on random data (property)") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const std::size_t n = testing::draw_between(rng, 2, 120);
    const std::size_t d = testing::draw_between(rng, 1, 6);
    auto x = testing::random_points(rng, n, d);
    // Duplicate some rows so empty-cluster repair and ties get exercised.
    for (std::size_t i = 1; i < n; i += 5) std::copy(x.row(i - 1).begin(), x.row(i - 1).end(), x.row(i).begin());
    const std::size_t s = testing::draw_between(rng, 1, std::min<std::size_t>(n, 12));
    const auto m = cluster_attribute(x, s, seed, seed % 2 ? Exec::Parallel : Exec::Serial);
    CAPTURE(seed);

    for (std::size_t t = 1; t < m.sse_history.size(); ++t) {
      CHECK(m.sse_history[t] <= m.sse_history[t - 1] * (1.0 + 1e-12) + 1e-12);
    }
    const auto members = m.members();
    for (const auto& g : members) CHECK_FALSE(g.empty());

    const auto samples = select_centroids(m, x);
    CHECK(samples.size() == s);
    for (std::size_t c = 0; c < s; ++c) {
      const std::vector<double> cen(m.centroid(c).begin(), m.centroid(c).end());
      CHECK(m.assignments[samples[c]] == c);
      for (const auto i : members[c]) {
        const double di = oracle::dist2(x, i, cen), ds = oracle::dist2(x, samples[c], cen);
        CHECK(ds <= di);
        if (di == ds) CHECK(samples[c] <= i);
      }
    }

    const auto again = cluster_attribute(x, s, seed, Exec::Serial);
    CHECK(again.assignments == m.assignments);
    CHECK(again.centroids == m.centroids);
    CHECK(select_centroids(again, x) == samples);
  }
}

TEST_CASE("converged centroids are the member means") {
  Rng rng(3);
  const auto x = testing::random_points(rng, 60, 3);
  const auto m = cluster_attribute(x, 5, 9);
  REQUIRE(m.converged);
  const auto members = m.members();
  for (std::size_t c = 0; c < 5; ++c) {
    const auto mean = member_mean(x, members[c]);
    for (std::size_t k = 0; k < 3; ++k) CHECK(m.centroid(c)[k] == doctest::Approx(mean[k]).epsilon(1e-9));
  }
}

TEST_CASE("cluster model round-trips through disk") {
  testing::TempDir dir("km");
  Rng rng(1);
  const auto x = testing::random_points(rng, 30, 2);
  const auto m = cluster_attribute(x, 4, 2);
  save_cluster_model(dir / "c", m);
  const auto back = load_cluster_model(dir / "c");
  CHECK(back.assignments == m.assignments);
  CHECK(back.centroids == m.centroids);
  CHECK(back.sse_history == m.sse_history);
  CHECK(select_centroids(back, x) == select_centroids(m, x));
}

}  // TEST_SUITE

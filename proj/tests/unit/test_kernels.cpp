#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "zeroed/core/synthetic.hpp"
#include "zeroed/criteria/criterion.hpp"
#include "zeroed/detector/mlp.hpp"
#include "zeroed/kernels/kernels.hpp"

using namespace zeroed;

// The OpenMP kernels must reproduce the serial reference bit for bit.

TEST_SUITE("kernels") {

TEST_CASE("serial and parallel kernels are bit-identical") {
  const auto ds = make_synthetic_people(700, 12);
  const FrequencyIndex index(ds);
  const auto emb = EmbeddingTable::hashing(32, 4);
  for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
    CHECK(kernels::serial::frequency_block(index, j) == kernels::parallel::frequency_block(index, j));
    CHECK(kernels::serial::embedding_block(index.values(j), emb) ==
          kernels::parallel::embedding_block(index.values(j), emb));
  }
  CHECK(kernels::serial::nmi_matrix(index) == kernels::parallel::nmi_matrix(index));

  criteria::CriterionSet set{"Salary",
                             {criteria::compile({"Salary", "n", "", "is_number and num(value) > 1000"}, ds.attributes()),
                              criteria::compile({"Salary", "m", "", "matches(\"^[0-9]+$\")"}, ds.attributes())}};
  const std::size_t sal = ds.attribute_index("Salary");
  CHECK(kernels::serial::criteria_block(set, ds, sal) == kernels::parallel::criteria_block(set, ds, sal));

  Rng rng(8);
  const auto x = testing::random_points(rng, 500, 7);
  std::vector<double> centroids(6 * 7);
  for (auto& c : centroids) c = rng.unit() - 0.5;
  std::vector<std::uint32_t> a(500, 0), b(500, 0);
  CHECK(kernels::serial::assign_nearest(x, centroids, 6, a) == kernels::parallel::assign_nearest(x, centroids, 6, b));
  CHECK(a == b);

  const auto w = detector::glorot_init(7, 16, 5);
  CHECK(kernels::serial::mlp_probabilities(w, x) == kernels::parallel::mlp_probabilities(w, x));
}

TEST_CASE("nearest-centroid ties go to the lower centroid") {
  FeatureMatrix x(1, 1);
  x(0, 0) = 5.0f;
  std::vector<std::uint32_t> a(1, 9);
  const std::vector<double> centroids{0.0, 10.0};
  kernels::serial::assign_nearest(x, centroids, 2, a);
  CHECK(a[0] == 0);
  std::vector<std::uint32_t> b(1, 9);
  kernels::parallel::assign_nearest(x, centroids, 2, b);
  CHECK(b[0] == 0);
}

}  // TEST_SUITE

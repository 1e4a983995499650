#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/detector/mlp.hpp"

using namespace zeroed;
using namespace zeroed::detector;

namespace {

// Two blobs split by the line x0 + x1 = 0.
void separable(std::size_t n, std::uint64_t seed, FeatureMatrix& x, std::vector<std::uint8_t>& y) {
  Rng rng(seed);
  x = FeatureMatrix(n, 2);
  y.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    x(i, 0) = float((pos ? 1.0 : -1.0) + 0.3 * (rng.unit() - 0.5));
    x(i, 1) = float((pos ? 1.0 : -1.0) + 0.3 * (rng.unit() - 0.5));
    y[i] = pos;
  }
}

Eigen::MatrixXd random_batch(Rng& rng, std::size_t b, std::size_t d) {
  Eigen::MatrixXd x(b, d);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.unit() * 2.0 - 1.0;
  }
  return x;
}

Eigen::VectorXd random_labels(Rng& rng, std::size_t b) {
  Eigen::VectorXd y(b);
  for (Eigen::Index r = 0; r < y.size(); ++r) y(r) = rng.chance(0.5) ? 1.0 : 0.0;
  return y;
}

// Negative control: a backward pass with scaled first-layer and bias terms.
MlpWeights broken_gradient(const MlpWeights& w, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  MlpWeights g = loss_gradient(w, x, y);
  g.w1 *= 1.5;
  g.b2 += 0.1;
  return g;
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("training on a separable toy set") {
  FeatureMatrix x;
  std::vector<std::uint8_t> y;
  separable(200, 1, x, y);
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.max_epochs = 100;
  cfg.seed = 4;
  const auto [model, rep] = train_mlp(x, y, cfg, "toy");
  CHECK(rep.train_loss < rep.initial_loss);
  CHECK(rep.validation_accuracy == 1.0);
  CHECK(predict(model, x) == y);
  CHECK(rep.train_curve.size() == rep.epochs);
  CHECK(rep.best_epoch <= rep.epochs);

  const auto [again, rep2] = train_mlp(x, y, cfg, "toy");
  CHECK(again.w.w1 == model.w.w1);
  CHECK(again.w.b1 == model.w.b1);
  CHECK(again.w.w2 == model.w.w2);
  CHECK(again.w.b2 == model.w.b2);
}

TEST_CASE("plain SGD also fits the toy set") {
  FeatureMatrix x;
  std::vector<std::uint8_t> y;
  separable(200, 2, x, y);
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.optimizer = Optimizer::Sgd;
  cfg.learning_rate = 0.1;
  cfg.max_epochs = 200;
  const auto [model, rep] = train_mlp(x, y, cfg);
  CHECK(rep.train_loss < rep.initial_loss);
  CHECK(predict(model, x) == y);
}

TEST_CASE("training preconditions") {
  FeatureMatrix x;
  std::vector<std::uint8_t> y;
  separable(40, 3, x, y);
  std::vector<std::uint8_t> one_class(40, 1);
  CHECK_THROWS_AS(train_mlp(x, one_class, {}), InvalidArgument);
  CHECK_THROWS_AS(train_mlp(x.gather(std::vector<std::size_t>{0, 1, 2}), std::vector<std::uint8_t>{0, 1, 0}, {}),
                  InvalidArgument);
  TrainConfig bad;
  bad.validation_fraction = 0.9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero weights give probability one half and a right verdict") {
  MlpModel m;
  m.w.w1 = Eigen::MatrixXd::Zero(4, 3);
  m.w.b1 = Eigen::VectorXd::Zero(4);
  m.w.w2 = Eigen::RowVectorXd::Zero(4);
  Rng rng(1);
  const auto x = testing::random_points(rng, 10, 3);
  for (const double p : predict_proba(m, x)) {
    CHECK(p == 0.5);
    CHECK_FALSE(verdict(p));
  }
  CHECK(verdict(std::nextafter(0.5, 1.0)));
  CHECK_THROWS_AS(predict_proba(m, testing::random_points(rng, 2, 5)), ShapeError);
}

TEST_CASE("prediction is row-equivariant") {
  Rng rng(6);
  MlpModel m;
  m.w = glorot_init(5, 7, 2);
  const auto x = testing::random_points(rng, 30, 5);
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));
  const auto p = predict_proba(m, x);
  const auto q = predict_proba(m, x.gather(perm));
  for (std::size_t k = 0; k < 30; ++k) CHECK(q[k] == p[perm[k]]);
}

TEST_CASE("loss is non-negative and near zero for perfect predictions") {
  Rng rng(3);
  for (int draw = 0; draw < 10; ++draw) {
    const auto w = glorot_init(4, 6, draw);
    CHECK(loss(w, random_batch(rng, 16, 4), random_labels(rng, 16)) >= 0.0);
  }
  // A huge output bias saturates every prediction to the clamp.
  MlpWeights w = glorot_init(2, 3, 1);
  w.w2.setZero();
  w.b2 = 50.0;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(8);
  CHECK(loss(w, random_batch(rng, 8, 2), ones) <= 1e-6);
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(11);
  for (int draw = 0; draw < 20; ++draw) {
    const std::size_t d = 1 + rng.below(6), h = 1 + rng.below(8), b = 1 + rng.below(12);
    const auto w = glorot_init(d, h, rng.next());
    CHECK(gradient_check(w, random_batch(rng, b, d), random_labels(rng, b)) <= 1e-4);
  }
  // Zero inputs put every hidden unit at b1; keep it off the ReLU kink.
  auto w = glorot_init(3, 4, 7);
  w.b1.setConstant(0.1);
  w.b1(1) = -0.1;
  CHECK(gradient_check(w, Eigen::MatrixXd::Zero(5, 3), random_labels(rng, 5)) <= 1e-4);
}

TEST_CASE("a corrupted backward pass fails the gradient check") {
  Rng rng(12);
  const auto w = glorot_init(4, 5, 1);
  CHECK(gradient_check(w, random_batch(rng, 8, 4), random_labels(rng, 8), 1e-5, broken_gradient) > 1e-2);
  CHECK_THROWS(gradient_check(w, random_batch(rng, 8, 4), random_labels(rng, 8), 1.0));
}

TEST_CASE("models round-trip through disk") {
  testing::TempDir dir("mlp");
  MlpModel m;
  m.attr = "Zip";
  m.w = glorot_init(6, 5, 3);
  m.w.b2 = 0.125;
  save_model(dir / "m", m, R"({"note":"x"})");
  const auto back = load_model(dir / "m");
  CHECK(back.attr == "Zip");
  CHECK(back.w.w1 == m.w.w1);
  CHECK(back.w.b1 == m.w.b1);
  CHECK(back.w.w2 == m.w.w2);
  CHECK(back.w.b2 == m.w.b2);
  std::filesystem::resize_file(dir / "m.bin", 20);
  CHECK_THROWS(load_model(dir / "m"));
}

}  // TEST_SUITE

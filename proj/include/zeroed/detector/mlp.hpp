#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zeroed/features/feature_matrix.hpp"
#include "zeroed/kernels/exec.hpp"
#include "zeroed/kernels/kernels.hpp"

namespace zeroed::detector {

using kernels::MlpWeights;

/// Output probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside the loss.
inline constexpr double kProbClamp = 1e-7;

struct MlpModel {
  std::string attr;
  MlpWeights w;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(w.w1.cols()); }
  std::size_t hidden() const noexcept { return static_cast<std::size_t>(w.w1.rows()); }
};

enum class Optimizer { Adam, Sgd };
const char* to_string(Optimizer o) noexcept;
Optimizer optimizer_from_string(const std::string& name);

struct TrainConfig {
  std::size_t hidden = 128;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 200;
  double validation_fraction = 0.1;
  std::size_t patience = 20;
  Optimizer optimizer = Optimizer::Adam;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless every knob is positive and the validation
  /// fraction lies in (0, 0.5].
  void validate() const;
};

struct TrainReport {
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  double initial_loss = 0.0;  // training loss before the first update
  double train_loss = 0.0;    // of the returned weights
  double validation_loss = 0.0;
  double validation_accuracy = 0.0;
  std::vector<double> train_curve;       // per epoch
  std::vector<double> validation_curve;  // per epoch
};

/// Glorot-uniform weights, zero biases.
MlpWeights glorot_init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed);

/// Mean binary cross-entropy with clamped probabilities.
double loss(const MlpWeights& w, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Analytic gradient of `loss`, same layout as the weights.
MlpWeights loss_gradient(const MlpWeights& w, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Mini-batch training with early stopping on validation loss; the weights
/// of the best validation epoch are returned. Throws InvalidArgument for
/// fewer than 10 rows or a single class, and Error on a non-finite loss.
std::pair<MlpModel, TrainReport> train_mlp(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                                           const TrainConfig& cfg, std::string attr = {});

/// Probability of the error class per row. Throws ShapeError on a width mismatch.
std::vector<double> predict_proba(const MlpModel& model, const FeatureMatrix& x, Exec exec = Exec::Parallel);

/// error iff p > 0.5.
inline bool verdict(double p) noexcept { return p > 0.5; }
std::vector<std::uint8_t> predict(const MlpModel& model, const FeatureMatrix& x, Exec exec = Exec::Parallel);

using GradientFn = std::function<MlpWeights(const MlpWeights&, const Eigen::MatrixXd&, const Eigen::VectorXd&)>;

/// Largest |analytic - numeric| / max(|analytic|, |numeric|) over all
/// parameters, with central differences of step epsilon. Pairs where both
/// magnitudes are below 1e-10 count as agreeing.
double gradient_check(const MlpWeights& w, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double epsilon = 1e-5,
                      const GradientFn& gradient = loss_gradient);

Eigen::MatrixXd to_eigen(const FeatureMatrix& x);

/// `<base>.bin`: uint64 D, uint64 H, then W1 (row-major), b1, W2, b2 as
/// float64. `<base>.json`: attr plus caller metadata.
void save_model(const std::filesystem::path& base, const MlpModel& model, const std::string& meta_json = "{}");
MlpModel load_model(const std::filesystem::path& base);

}  // namespace zeroed::detector

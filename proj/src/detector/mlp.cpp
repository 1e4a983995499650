#include "zeroed/detector/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/core/files.hpp"
#include "zeroed/core/rng.hpp"

namespace zeroed::detector {

namespace {

struct Forward {
  Eigen::MatrixXd z1;  // B x H
  Eigen::MatrixXd a1;  // B x H
  Eigen::VectorXd p;   // B
};

Forward forward(const MlpWeights& w, const Eigen::MatrixXd& x) {
  Forward f;
  f.z1 = (x * w.w1.transpose()).rowwise() + w.b1.transpose();
  f.a1 = f.z1.cwiseMax(0.0);
  const Eigen::VectorXd z2 = (f.a1 * w.w2.transpose()).array() + w.b2;
  f.p = z2.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
  return f;
}

double mean_bce(const Eigen::VectorXd& p, const Eigen::VectorXd& y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pc = std::clamp(p[i], kProbClamp, 1.0 - kProbClamp);
    total -= y[i] * std::log(pc) + (1.0 - y[i]) * std::log(1.0 - pc);
  }
  return total / static_cast<double>(p.size());
}

// Visits every parameter of `w`: W1 row-major, b1, W2, b2.
template <typename F>
void for_each_param(MlpWeights& w, F&& f) {
  for (Eigen::Index r = 0; r < w.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.w1.cols(); ++c) f(w.w1(r, c));
  }
  for (Eigen::Index k = 0; k < w.b1.size(); ++k) f(w.b1[k]);
  for (Eigen::Index k = 0; k < w.w2.size(); ++k) f(w.w2[k]);
  f(w.b2);
}

MlpWeights zeros_like(const MlpWeights& w) {
  MlpWeights z;
  z.w1 = Eigen::MatrixXd::Zero(w.w1.rows(), w.w1.cols());
  z.b1 = Eigen::VectorXd::Zero(w.b1.size());
  z.w2 = Eigen::RowVectorXd::Zero(w.w2.size());
  z.b2 = 0.0;
  return z;
}

class Stepper {
 public:
  Stepper(const TrainConfig& cfg, const MlpWeights& shape) : cfg_(cfg), m_(zeros_like(shape)), v_(zeros_like(shape)) {}

  void step(MlpWeights& w, const MlpWeights& g) {
    const double lr = cfg_.learning_rate;
    if (cfg_.optimizer == Optimizer::Sgd) {
      w.w1 -= lr * g.w1;
      w.b1 -= lr * g.b1;
      w.w2 -= lr * g.w2;
      w.b2 -= lr * g.b2;
      return;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
      m = kBeta1 * m + (1.0 - kBeta1) * grad;
      v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
      param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
    };
    update(w.w1, m_.w1, v_.w1, g.w1);
    update(w.b1, m_.b1, v_.b1, g.b1);
    update(w.w2, m_.w2, v_.w2, g.w2);
    m_.b2 = kBeta1 * m_.b2 + (1.0 - kBeta1) * g.b2;
    v_.b2 = kBeta2 * v_.b2 + (1.0 - kBeta2) * g.b2 * g.b2;
    w.b2 -= lr * (m_.b2 / c1) / (std::sqrt(v_.b2 / c2) + kEps);
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  const TrainConfig& cfg_;
  MlpWeights m_;
  MlpWeights v_;
  std::size_t t_ = 0;
};

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& y, std::span<const std::size_t> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = y[static_cast<Eigen::Index>(rows[r])];
  return out;
}

}  // namespace

const char* to_string(Optimizer o) noexcept { return o == Optimizer::Adam ? "adam" : "sgd"; }

Optimizer optimizer_from_string(const std::string& name) {
  if (name == "adam") return Optimizer::Adam;
  if (name == "sgd") return Optimizer::Sgd;
  throw ConfigError("unknown optimizer " + name);
}

void TrainConfig::validate() const {
  if (hidden == 0 || batch_size == 0 || max_epochs == 0 || patience == 0) {
    throw ConfigError("hidden width, batch size, epochs and patience must be positive");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction <= 0.5)) {
    throw ConfigError("validation fraction must lie in (0, 0.5]");
  }
}

MlpWeights glorot_init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed) {
  Rng rng(seed);
  auto uniform = [&](double limit) { return (2.0 * rng.unit() - 1.0) * limit; };
  const auto d = static_cast<Eigen::Index>(input_dim);
  const auto h = static_cast<Eigen::Index>(hidden);
  MlpWeights w;
  w.w1.resize(h, d);
  const double l1 = std::sqrt(6.0 / static_cast<double>(input_dim + hidden));
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) w.w1(r, c) = uniform(l1);
  }
  w.b1 = Eigen::VectorXd::Zero(h);
  w.w2.resize(h);
  const double l2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  for (Eigen::Index c = 0; c < h; ++c) w.w2[c] = uniform(l2);
  w.b2 = 0.0;
  return w;
}

double loss(const MlpWeights& w, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return mean_bce(forward(w, x).p, y);
}

MlpWeights loss_gradient(const MlpWeights& w, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto f = forward(w, x);
  const double inv_b = 1.0 / static_cast<double>(x.rows());
  Eigen::VectorXd dz2(f.p.size());
  for (Eigen::Index i = 0; i < f.p.size(); ++i) {
    const bool clamped = f.p[i] < kProbClamp || f.p[i] > 1.0 - kProbClamp;
    dz2[i] = clamped ? 0.0 : (f.p[i] - y[i]) * inv_b;
  }
  MlpWeights g;
  g.w2 = dz2.transpose() * f.a1;
  g.b2 = dz2.sum();
  const Eigen::MatrixXd dz1 = ((dz2 * w.w2).array() * (f.z1.array() > 0.0).cast<double>()).matrix();
  g.w1 = dz1.transpose() * x;
  g.b1 = dz1.colwise().sum().transpose();
  return g;
}

Eigen::MatrixXd to_eigen(const FeatureMatrix& x) {
  return Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
             x.data().data(), static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(x.cols()))
      .cast<double>();
}

std::pair<MlpModel, TrainReport> train_mlp(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                                           const TrainConfig& cfg, std::string attr) {
  cfg.validate();
  const std::size_t n = features.rows();
  if (labels.size() != n) throw ShapeError("one label per training row expected");
  if (n < 10) throw InvalidArgument("training needs at least 10 rows");
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  if (pos == 0 || pos == n) throw InvalidArgument("training needs both classes");

  const Eigen::MatrixXd x = to_eigen(features);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = labels[i] ? 1.0 : 0.0;

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n))), 1, n - 1);
  const std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  const Eigen::MatrixXd x_val = gather_rows(x, val_rows);
  const Eigen::VectorXd y_val = gather(y, val_rows);
  const Eigen::MatrixXd x_train = gather_rows(x, train_rows);
  const Eigen::VectorXd y_train = gather(y, train_rows);

  MlpModel model{std::move(attr), glorot_init(features.cols(), cfg.hidden, hash_combine(cfg.seed, 1))};
  TrainReport rep;
  rep.initial_loss = loss(model.w, x_train, y_train);
  Stepper stepper(cfg, model.w);
  MlpWeights best = model.w;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> idx(train_rows.size());
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t b = 0; b < idx.size(); b += cfg.batch_size) {
      const auto batch = std::span<const std::size_t>(idx).subspan(b, std::min(cfg.batch_size, idx.size() - b));
      const auto g = loss_gradient(model.w, gather_rows(x_train, batch), gather(y_train, batch));
      stepper.step(model.w, g);
    }
    const double tl = loss(model.w, x_train, y_train);
    const double vl = loss(model.w, x_val, y_val);
    if (!std::isfinite(tl) || !std::isfinite(vl)) {
      throw Error("non-finite loss at epoch " + std::to_string(epoch) + " while training " + model.attr);
    }
    rep.train_curve.push_back(tl);
    rep.validation_curve.push_back(vl);
    rep.epochs = epoch;
    if (vl < best_val) {
      best_val = vl;
      best = model.w;
      rep.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  model.w = std::move(best);
  rep.train_loss = loss(model.w, x_train, y_train);
  rep.validation_loss = best_val;
  const Eigen::VectorXd p_val = forward(model.w, x_val).p;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < p_val.size(); ++i) correct += (verdict(p_val[i]) == (y_val[i] > 0.5)) ? 1 : 0;
  rep.validation_accuracy = static_cast<double>(correct) / static_cast<double>(p_val.size());
  spdlog::debug("{}: trained {} epochs (best {}), train loss {:.4f}, validation loss {:.4f}", model.attr, rep.epochs,
                rep.best_epoch, rep.train_loss, rep.validation_loss);
  return {std::move(model), std::move(rep)};
}

std::vector<double> predict_proba(const MlpModel& model, const FeatureMatrix& x, Exec exec) {
  if (x.cols() != model.input_dim()) throw ShapeError("feature width does not match the model input");
  return exec == Exec::Parallel ? kernels::parallel::mlp_probabilities(model.w, x)
                                : kernels::serial::mlp_probabilities(model.w, x);
}

std::vector<std::uint8_t> predict(const MlpModel& model, const FeatureMatrix& x, Exec exec) {
  const auto p = predict_proba(model, x, exec);
  std::vector<std::uint8_t> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = verdict(p[i]) ? 1 : 0;
  return out;
}

double gradient_check(const MlpWeights& w, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double epsilon,
                      const GradientFn& gradient) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) throw InvalidArgument("epsilon must lie in [1e-7, 1e-3]");
  MlpWeights analytic = gradient(w, x, y);
  MlpWeights probe = w;
  std::vector<double*> params;
  for_each_param(probe, [&](double& p) { params.push_back(&p); });
  std::vector<double> grads;
  for_each_param(analytic, [&](double& g) { grads.push_back(g); });
  if (grads.size() != params.size()) throw ShapeError("gradient shape does not match the weights");

  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = *params[k];
    *params[k] = saved + epsilon;
    const double up = loss(probe, x, y);
    *params[k] = saved - epsilon;
    const double down = loss(probe, x, y);
    *params[k] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double scale = std::max(std::abs(numeric), std::abs(grads[k]));
    if (scale < 1e-10) continue;
    worst = std::max(worst, std::abs(numeric - grads[k]) / scale);
  }
  return worst;
}

void save_model(const std::filesystem::path& base, const MlpModel& model, const std::string& meta_json) {
  const std::uint64_t dims[2] = {model.input_dim(), model.hidden()};
  std::string bytes(reinterpret_cast<const char*>(dims), sizeof dims);
  MlpWeights w = model.w;
  for_each_param(w, [&](double& p) { bytes.append(reinterpret_cast<const char*>(&p), sizeof p); });
  write_bytes_atomic(with_suffix(base, ".bin"), std::span<const char>(bytes.data(), bytes.size()));
  nlohmann::ordered_json side;
  side["attr"] = model.attr;
  side["input_dim"] = model.input_dim();
  side["hidden"] = model.hidden();
  side["meta"] = nlohmann::ordered_json::parse(meta_json);
  write_file_atomic(with_suffix(base, ".json"), side.dump(2) + "\n");
}

MlpModel load_model(const std::filesystem::path& base) {
  const auto side = nlohmann::json::parse(read_file(with_suffix(base, ".json")));
  const std::string bytes = read_file(with_suffix(base, ".bin"));
  std::uint64_t dims[2] = {0, 0};
  if (bytes.size() < sizeof dims) throw IoError("truncated model file " + base.string());
  std::memcpy(dims, bytes.data(), sizeof dims);
  MlpModel m;
  m.attr = side.at("attr").get<std::string>();
  const auto d = static_cast<Eigen::Index>(dims[0]);
  const auto h = static_cast<Eigen::Index>(dims[1]);
  m.w.w1.resize(h, d);
  m.w.b1.resize(h);
  m.w.w2.resize(h);
  const std::size_t expected = sizeof dims + sizeof(double) * static_cast<std::size_t>(h * d + 2 * h + 1);
  if (bytes.size() != expected) throw IoError("model file size mismatch for " + base.string());
  std::size_t off = sizeof dims;
  for_each_param(m.w, [&](double& p) {
    std::memcpy(&p, bytes.data() + off, sizeof p);
    off += sizeof p;
  });
  return m;
}

}  // namespace zeroed::detector

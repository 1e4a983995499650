#include "zeroed/core/metrics.hpp"

#include "json.hpp"
#include "zeroed/core/error.hpp"

namespace zeroed {

EvalReport score_confusion(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  EvalReport r{.tp = tp, .fp = fp, .fn = fn, .tn = tn};
  if (tp + fn == 0 && tp + fp == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  r.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  const double s = r.precision + r.recall;
  r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

namespace {

EvalReport evaluate_range(const CellMask& pred, const CellMask& truth, std::size_t j0, std::size_t j1) {
  if (!pred.same_shape(truth)) throw ShapeError("prediction and truth masks differ in shape");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < pred.rows(); ++i) {
    for (std::size_t j = j0; j < j1; ++j) {
      const bool p = pred.get(i, j);
      const bool t = truth.get(i, j);
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
      tn += !p && !t;
    }
  }
  return score_confusion(tp, fp, fn, tn);
}

}  // namespace

EvalReport evaluate_detection(const CellMask& pred, const CellMask& truth) {
  return evaluate_range(pred, truth, 0, pred.cols());
}

EvalReport evaluate_column(const CellMask& pred, const CellMask& truth, std::size_t j) {
  if (j >= pred.cols()) throw InvalidArgument("column index out of range");
  return evaluate_range(pred, truth, j, j + 1);
}

std::string to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["tn"] = r.tn;
  return j.dump();
}

}  // namespace zeroed

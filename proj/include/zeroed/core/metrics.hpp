#pragma once

#include <cstddef>
#include <string>

#include "zeroed/core/mask.hpp"

namespace zeroed {

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

/// Quotients with a zero denominator are 0, except that an empty prediction
/// against an error-free truth scores P = R = F1 = 1.
EvalReport score_confusion(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

/// Cell-level precision/recall/F1 of `pred` against `truth`. Throws ShapeError.
EvalReport evaluate_detection(const CellMask& pred, const CellMask& truth);

/// Same, restricted to one attribute column.
EvalReport evaluate_column(const CellMask& pred, const CellMask& truth, std::size_t j);

/// Flat JSON object {precision, recall, f1, tp, fp, fn, tn}.
std::string to_json(const EvalReport& report);

}  // namespace zeroed

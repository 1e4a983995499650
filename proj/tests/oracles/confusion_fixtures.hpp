#pragma once

// Confusion-matrix fixtures with precision, recall and F1 worked out by hand.
// Degenerate denominators follow the library rule: a zero denominator gives 0,
// except an empty prediction on an error-free truth, which scores 1.

#include <array>
#include <cstddef>

namespace zeroed::oracle {

struct ConfusionFixture {
  const char* name;
  std::size_t tp, fp, fn, tn;
  double precision, recall, f1;
};

inline constexpr std::array<ConfusionFixture, 5> kConfusionFixtures = {{
    // 2/(2+1), 2/(2+2), 2*(2/3)(1/2)/((2/3)+(1/2)) = (2/3)/(7/6) = 4/7
    {"tp2_fp1_fn2", 2, 1, 2, 5, 2.0 / 3.0, 0.5, 4.0 / 7.0},
    {"perfect", 3, 0, 0, 9, 1.0, 1.0, 1.0},
    // nothing predicted, errors exist: P has 0/0 -> 0, R = 0/4, F1 = 0
    {"empty_prediction", 0, 0, 4, 8, 0.0, 0.0, 0.0},
    // everything wrong: P = 0/3, R = 0/0 -> 0, F1 = 0
    {"all_false_positive_no_truth", 0, 3, 0, 9, 0.0, 0.0, 0.0},
    // no errors and none predicted
    {"clean_and_quiet", 0, 0, 0, 12, 1.0, 1.0, 1.0},
}};

}  // namespace zeroed::oracle

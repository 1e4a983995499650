#pragma once

// Hand-rolled generators for the property tests. Every case is drawn from a
// seeded Rng, so a failure report carrying the case seed reproduces exactly.

#include <cstddef>
#include <string>
#include <vector>

#include "zeroed/core/dataset.hpp"
#include "zeroed/core/rng.hpp"
#include "zeroed/features/feature_matrix.hpp"

namespace zeroed::testing {

inline std::size_t draw_between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

/// Categorical table with values "v0".."v{card-1}" per column.
inline Dataset random_categorical(Rng& rng, std::size_t rows, std::size_t cols, std::size_t max_card) {
  std::vector<std::string> attrs;
  for (std::size_t j = 0; j < cols; ++j) attrs.push_back("c" + std::to_string(j));
  std::vector<std::size_t> card(cols);
  for (auto& c : card) c = draw_between(rng, 1, max_card);
  std::vector<std::vector<std::string>> data(rows, std::vector<std::string>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) data[i][j] = "v" + std::to_string(rng.below(card[j]));
  }
  return Dataset("random", attrs, data);
}

/// Short strings over a mix of character classes, including empty strings,
/// punctuation, digits and a few multi-byte UTF-8 sequences.
inline std::string random_value(Rng& rng, std::size_t max_len = 12) {
  static const std::vector<std::string> pieces = {
      "a", "b", "Z", "Q", "x", "0", "7", "9", "-", ".", " ", "/", "@", "_", "\xc3\xa9", "\xe2\x82\xac", "'", "\"",
      ",", "1e308", "NaN", "inf"};
  std::string out;
  const std::size_t len = static_cast<std::size_t>(rng.below(max_len + 1));
  for (std::size_t k = 0; k < len; ++k) out += pieces[rng.below(pieces.size())];
  return out;
}

inline FeatureMatrix random_points(Rng& rng, std::size_t rows, std::size_t cols, double spread = 1.0) {
  FeatureMatrix m(rows, cols);
  for (auto& v : m.data()) v = static_cast<float>((rng.unit() * 2.0 - 1.0) * spread);
  return m;
}

}  // namespace zeroed::testing

#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "zeroed/core/dataset.hpp"
#include "zeroed/core/mask.hpp"
#include "zeroed/llm/provider.hpp"

namespace zeroed::llm {

/// Offline stand-in for an idealized annotator that can see the clean table.
///
/// It answers each stage from ground truth instead of language understanding:
/// labels come from the dirty/clean diff (flipped with probability `noise`,
/// by a hash of seed, row and attribute); criteria describe the clean column
/// (non-emptiness, numeric type and range, value domain, character shape,
/// length, and value dependencies on low-cardinality attributes); augmented
/// variants come from the same corruption generators as error injection.
/// Prompts are parsed through the shared markers in prompt_markers.hpp.
class OracleProvider final : public Provider {
 public:
  OracleProvider(Dataset dirty, Dataset clean, double noise, std::uint64_t seed);

  CompletionResponse complete(const PromptRequest& req) override;
  std::string name() const override { return "oracle"; }

  /// DSL expressions the oracle proposes for attribute j (at most 8).
  std::vector<std::string> criteria_for(std::size_t j) const;

  /// The oracle's verdict for cell (i, j) after noise.
  bool says_error(std::size_t i, std::size_t j) const;

 private:
  std::string answer_labeling(const std::string& prompt, std::size_t j) const;
  std::string answer_criteria(std::size_t j) const;
  std::string answer_guideline(const std::string& prompt, std::size_t j) const;
  std::string answer_augment(const std::string& prompt, std::size_t j) const;
  std::size_t attribute_of(const std::string& prompt) const;

  Dataset dirty_;
  Dataset clean_;
  CellMask mask_;
  double noise_;
  std::uint64_t seed_;
  std::vector<std::unordered_set<std::string>> clean_patterns_;
};

/// `[row <id>] <payload>` lines of a prompt, in order.
struct RowLine {
  std::size_t row = 0;
  std::string payload;
};
std::vector<RowLine> parse_row_lines(const std::string& prompt);

/// Value of the first `Attribute: <name>` line, if any.
std::string parse_attribute_line(const std::string& prompt);

}  // namespace zeroed::llm

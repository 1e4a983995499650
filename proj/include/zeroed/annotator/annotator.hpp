#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeroed/annotator/probes.hpp"
#include "zeroed/core/dataset.hpp"
#include "zeroed/criteria/criterion.hpp"
#include "zeroed/llm/gateway.hpp"

namespace zeroed::annotator {

struct AnnotatorConfig {
  std::string model = "mock";
  std::size_t batch_size = 20;
  std::size_t criteria_sample = 20;   // full tuples shown when proposing criteria/probes
  std::size_t guideline_sample = 20;  // sampled tuples shown in the guideline prompt
  std::size_t max_criteria = 8;
  std::uint64_t seed = 0;
};

struct Guideline {
  std::size_t attr = 0;
  std::string text;
  bool ok = false;
  std::string diagnostics;
};

struct LlmLabel {
  std::size_t row = 0;
  std::size_t attr = 0;
  bool error = false;
  std::string reason;

  friend bool operator==(const LlmLabel&, const LlmLabel&) = default;
};

struct LabelOutcome {
  std::vector<LlmLabel> labels;     // batch order, row order within a batch
  std::vector<std::size_t> unlabeled;
  std::size_t batches = 0;
  std::size_t retried_batches = 0;
};

struct CriteriaOutcome {
  criteria::CriterionSet set;
  std::size_t proposed = 0;
  std::size_t repaired = 0;
  std::vector<std::string> warnings;
};

/// The LLM-facing stage: probes, guidelines, criteria and labeling for one
/// dataset. Holds references; the dataset and gateway must outlive it.
class Annotator {
 public:
  Annotator(const Dataset& ds, llm::Gateway& gateway, AnnotatorConfig cfg);

  const AnnotatorConfig& config() const noexcept { return cfg_; }

  /// `criteria_sample` rows drawn without replacement, seeded per attribute,
  /// returned in ascending order.
  std::vector<std::size_t> sample_rows(std::size_t attr) const;

  /// 2-6 probes picked by the LLM from the closed menu. Invalid entries are
  /// dropped; an empty or unusable answer yields default_probes(attr).
  std::vector<DistributionProbe> propose_probes(std::size_t attr, std::span<const std::size_t> sample_rows);

  /// Empty output is retried once; a second empty answer gives ok = false.
  Guideline build_guideline(std::size_t attr, std::span<const ProbeResult> results,
                            std::span<const std::size_t> sample_rows, std::span<const std::size_t> correlates);

  CriteriaOutcome propose_criteria(std::size_t attr, std::span<const std::size_t> sample_rows);

  /// Sends `prompt`, parses the criteria in the answer, and runs one repair
  /// round for expressions that fail to parse. Shared with refinement.
  CriteriaOutcome request_criteria(std::size_t attr, const std::string& prompt, llm::Stage stage,
                                   criteria::Origin origin);

  /// Batches of batch_size; a batch whose answer does not label every row
  /// exactly once is retried once, then its rows are reported unlabeled.
  LabelOutcome label_samples(std::size_t attr, const Guideline& guideline, std::span<const std::size_t> rows,
                             std::span<const std::size_t> correlates);

  llm::PromptRequest request(llm::Stage stage, std::string user) const;
  std::vector<llm::CompletionResponse> complete_all(std::span<const llm::PromptRequest> reqs) {
    return gateway_.complete_all(reqs);
  }

 private:
  const Dataset& ds_;
  llm::Gateway& gateway_;
  AnnotatorConfig cfg_;
};

/// Parses a labeling answer for one batch. Empty when the answer is not a
/// one-to-one labeling of `rows`.
std::optional<std::vector<LlmLabel>> parse_labels(std::string_view text, std::size_t attr,
                                                  std::span<const std::size_t> rows);

/// Prompt plus expected completion tokens of labeling every cell of every
/// attribute in batches, without a guideline. The completion is estimated as
/// the shortest valid answer.
std::size_t naive_labeling_tokens(const Dataset& ds, std::span<const std::vector<std::size_t>> correlates,
                                  std::size_t batch_size);

nlohmann::ordered_json to_json(const LlmLabel& l, const Dataset& ds);
LlmLabel label_from_json(const nlohmann::json& j, const Dataset& ds);

}  // namespace zeroed::annotator

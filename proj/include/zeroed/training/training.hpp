#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "zeroed/annotator/annotator.hpp"
#include "zeroed/core/dataset.hpp"
#include "zeroed/criteria/criterion.hpp"
#include "zeroed/features/feature_matrix.hpp"
#include "zeroed/features/unified.hpp"
#include "zeroed/sampler/kmeans.hpp"

namespace zeroed::training {

enum class Provenance : std::uint8_t { Llm, Propagated, Synthetic };
const char* to_string(Provenance p) noexcept;
Provenance provenance_from_string(std::string_view s);

struct CellLabel {
  std::size_t row = 0;
  bool error = false;
  Provenance provenance = Provenance::Propagated;

  friend bool operator==(const CellLabel&, const CellLabel&) = default;
};

/// Labels of one attribute, ascending by row.
struct PropagatedLabels {
  std::size_t attr = 0;
  std::vector<CellLabel> cells;

  std::vector<std::size_t> rows_with(bool error) const;
};

/// Every member of a cluster takes the label of the labeled sample in it.
/// Clusters whose sample has no label emit nothing. Throws InvalidArgument for
/// a label on a row outside the model or two labels in one cluster.
PropagatedLabels propagate_labels(const ClusterModel& model, std::span<const annotator::LlmLabel> labels,
                                  std::size_t attr);

struct RefineOutcome {
  criteria::CriterionSet set;
  bool refined = false;  // false: the base set was kept
  std::vector<std::string> warnings;
};

/// Up to 20 right and 20 error cells (distinct values, row order) shown side
/// by side; the parsed answer replaces the base set. Keeps `base` when the
/// error group is empty, the call fails or nothing parses.
RefineOutcome refine_criteria(annotator::Annotator& ann, const Dataset& ds, std::size_t attr,
                              const PropagatedLabels& labels, std::span<const std::size_t> correlates,
                              const criteria::CriterionSet& base);

/// Drops criteria whose accuracy on `right_rows` is below 0.5 (exactly 0.5
/// stays). Stats are reported for every input criterion, in order.
criteria::CriterionSet verify_criteria(const criteria::CriterionSet& set, const Dataset& ds, std::size_t attr,
                                       std::span<const std::size_t> right_rows,
                                       std::vector<criteria::VerificationStats>* stats = nullptr);

/// Drops right-labeled rows passing fewer than half of the criteria. An empty
/// set filters nothing.
std::vector<std::size_t> verify_right_labels(std::span<const std::size_t> right_rows,
                                             const criteria::CriterionSet& set, const Dataset& ds,
                                             std::size_t attr);

struct Verification {
  criteria::CriterionSet set;
  std::vector<std::size_t> right_rows;
  std::vector<criteria::VerificationStats> stats;  // first criteria pass
  std::size_t rounds = 0;
};

/// Criteria-then-data filtering, repeated until neither step removes
/// anything, so both postconditions hold on the returned sets.
Verification mutual_verification(const criteria::CriterionSet& set, const Dataset& ds, std::size_t attr,
                                 std::span<const std::size_t> right_rows);

enum class Generator : std::uint8_t { Llm, Fallback };
const char* to_string(Generator g) noexcept;

struct AugmentedError {
  std::size_t attr = 0;
  std::size_t row = 0;  // the corrupted cell
  std::string source;
  std::string variant;
  Generator generator = Generator::Fallback;
};

struct AugmentConfig {
  std::size_t llm_values = 40;  // clean values sent to the LLM per attribute (0 disables)
  std::size_t batch_size = 20;
  std::uint64_t seed = 0;
};

/// Erroneous variants of verified clean cells until `target` are produced.
/// LLM variants come first (at most 3 per value); deterministic injectors
/// (typo, empty, pattern mangle, numeric scaling) fill any shortfall.
/// No variant equals its source. Returns fewer than `target` only when the
/// right set is empty.
std::vector<AugmentedError> augment_errors(annotator::Annotator* ann, const Dataset& ds, std::size_t attr,
                                           std::span<const std::size_t> right_rows, std::size_t target,
                                           const AugmentConfig& cfg);

/// One unified row per augmented error: the variant's base vector (as if it
/// replaced the cell) followed by the correlates' unchanged base rows.
FeatureMatrix featurize_augmented(const FrequencyIndex& index, const EmbeddingTable& table,
                                  const criteria::CriterionSet& set, const BaseLayout& layout,
                                  std::span<const FeatureMatrix> bases, std::span<const std::size_t> correlates,
                                  std::span<const AugmentedError> augmented);

struct TrainingSet {
  std::size_t attr = 0;
  FeatureMatrix x;
  std::vector<std::uint8_t> y;
  std::vector<Provenance> provenance;
  std::vector<std::size_t> rows;  // cell row each example came from
  std::vector<std::string> variants;  // synthetic rows only, empty otherwise

  std::size_t size() const noexcept { return y.size(); }
  std::size_t positives() const;
  std::size_t count(Provenance p) const;
};

struct AssemblyReport {
  std::size_t right = 0;
  std::size_t errors = 0;     // llm + propagated error labels
  std::size_t synthetic = 0;
  double ratio = 0.0;         // (errors + synthetic) / right
  bool balanced = false;      // ratio within [0.8, 1.25]
  bool excluded = false;
  std::string diagnostics;
};

/// right rows (label 0) ∪ error rows (label 1) ∪ synthetic rows (label 1),
/// shuffled under `seed`. `synthetic_features` holds one unified row per
/// augmented error. A class missing entirely marks the attribute excluded.
TrainingSet assemble_training_set(std::size_t attr, const FeatureMatrix& unified, const PropagatedLabels& labels,
                                  std::span<const std::size_t> verified_right,
                                  std::span<const AugmentedError> augmented, const FeatureMatrix& synthetic_features,
                                  std::uint64_t seed, AssemblyReport* report = nullptr);

/// `<base>.f32` + `<base>.json` for features and `<base>.labels.jsonl`.
void save_training_set(const std::filesystem::path& base, const TrainingSet& ts);
TrainingSet load_training_set(const std::filesystem::path& base);

}  // namespace zeroed::training

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zeroed/detector/mlp.hpp"
#include "zeroed/kernels/exec.hpp"
#include "zeroed/llm/provider.hpp"
#include "zeroed/training/training.hpp"

namespace zeroed::pipeline {

enum class StageId {
  Features,
  Correlations,
  Criteria,
  CriteriaFeatures,
  Unified,
  Clustering,
  Sampling,
  Probes,
  Guidelines,
  Labeling,
  TrainingData,
  Training,
  Prediction,
  Evaluation,
};

inline constexpr std::size_t kStageCount = 14;
inline constexpr std::array<StageId, kStageCount> kAllStageIds = {
    StageId::Features,  StageId::Correlations, StageId::Criteria, StageId::CriteriaFeatures, StageId::Unified,
    StageId::Clustering, StageId::Sampling,    StageId::Probes,   StageId::Guidelines,       StageId::Labeling,
    StageId::TrainingData, StageId::Training,  StageId::Prediction, StageId::Evaluation};

const char* to_string(StageId s) noexcept;
std::optional<StageId> stage_id_from_string(std::string_view name) noexcept;

/// Comma-separated names, each optionally a range `first..last`
/// (e.g. `features..labeling,prediction`). Throws ConfigError.
std::vector<StageId> parse_stage_selection(std::string_view text);

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path truth;  // empty: no ground truth
  std::filesystem::path out = "zeroed-run";
  std::filesystem::path cache_dir;  // empty: <out>/cache
  std::filesystem::path embeddings;  // .vec file; empty: hashing embeddings

  llm::ProviderConfig provider;
  std::string model = "mock";
  std::size_t max_in_flight = 4;

  double label_rate = 0.05;
  std::size_t clusters = 0;  // fixed cluster count per attribute; 0 derives it from label_rate
  std::size_t corr_k = 2;
  std::size_t batch_size = 20;
  std::size_t max_criteria = 8;
  std::size_t semantic_dim = 64;
  std::uint64_t seed = 0;

  detector::TrainConfig train;
  training::AugmentConfig augment;

  std::vector<StageId> stages;  // empty: all
  bool resume = false;
  Exec exec = Exec::Parallel;

  /// Throws ConfigError on out-of-range knobs or missing required inputs.
  void validate() const;
  std::filesystem::path effective_cache_dir() const { return cache_dir.empty() ? out / "cache" : cache_dir; }
};

/// Reads a TOML config. Relative paths are resolved against the file's
/// directory. Unknown keys are rejected. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir = {});

/// Resolved configuration as persisted in the run directory.
nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace zeroed::pipeline

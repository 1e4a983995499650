#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zeroed/core/error.hpp"
#include "zeroed/core/mask.hpp"
#include "zeroed/core/metrics.hpp"
#include "zeroed/llm/ledger.hpp"
#include "zeroed/pipeline/config.hpp"

namespace zeroed::pipeline {

/// Version of the run-directory layout below; bump on any change.
///
///   config.json  manifest.json  run_stats.json
///   features/intrinsic/aNN.*  features/criteria/aNN.*  features/unified/aNN.*
///   features/final/aNN.*      correlations.json        criteria/{initial,refined,verified}.json
///   clusters/aNN.*            samples.json             probes.json
///   guidelines.json           labels/{llm,propagated}.jsonl  labels/unlabeled.json
///   verification.json         augment/errors.jsonl     training/aNN.*  training/report.json
///   models/aNN.*  models/report.json  detection/{mask.csv,probabilities.*}
///   evaluation.json  ledger/<stage>.json  audit/<stage>/NNNNN_<llm stage>.txt
///   report/{mask.csv,metrics.json,ledger.json,summary.txt}
inline constexpr int kLayoutVersion = 1;

/// A stage threw; the message names it. Artifacts of earlier stages remain.
class StageFailure : public Error {
 public:
  StageFailure(StageId stage, const std::string& what)
      : Error(std::string("stage ") + to_string(stage) + " failed: " + what), stage_(stage) {}
  StageId stage() const noexcept { return stage_; }

 private:
  StageId stage_;
};

struct AttributeSummary {
  std::string attr;
  std::size_t clusters = 0;
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
  std::size_t criteria_initial = 0;
  std::size_t criteria_verified = 0;
  std::size_t train_rows = 0;
  bool trained = false;
  std::size_t predicted_errors = 0;
  std::optional<EvalReport> eval;
};

struct RunResult {
  std::filesystem::path out;
  std::vector<StageId> executed;  // computed in this process
  std::vector<StageId> loaded;    // restored from artifacts
  std::optional<CellMask> mask;
  std::optional<EvalReport> eval;
  std::vector<AttributeSummary> attributes;
  llm::UsageReport usage;         // all LLM stages of the run, from the persisted ledgers
  std::size_t provider_calls = 0; // issued by this process
};

/// Runs the selected stages in order, writing each stage's artifacts before
/// the next starts. With `resume`, stages whose artifacts are complete are
/// loaded instead of recomputed, up to the first missing one.
/// Throws ConfigError for invalid configuration and StageFailure otherwise.
RunResult run_pipeline(const RunConfig& cfg);

/// Writes report/{mask.csv, metrics.json (with truth), ledger.json,
/// summary.txt} from the artifacts in `run_dir`. Needs detection/mask.csv.
void write_report(const std::filesystem::path& run_dir);

/// Naive labeling baseline for the run's dataset and correlates.
std::size_t naive_baseline_tokens(const std::filesystem::path& run_dir);

}  // namespace zeroed::pipeline

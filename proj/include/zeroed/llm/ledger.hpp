#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "json.hpp"
#include "zeroed/llm/types.hpp"

namespace zeroed::llm {

struct LedgerEntry {
  Stage stage = Stage::Labeling;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  bool cached = false;
};

/// Append-only record of every gateway call. Thread-safe.
class Ledger {
 public:
  void record(const LedgerEntry& e);
  std::vector<LedgerEntry> entries() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::vector<LedgerEntry> entries_;
};

struct StageUsage {
  std::size_t calls = 0;
  std::size_t cache_hits = 0;
  // Charged: non-cached calls only.
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  // Attributed: every call, cached or not (what the run consumed overall).
  std::size_t attributed_prompt_tokens = 0;
  std::size_t attributed_completion_tokens = 0;

  std::size_t charged_total() const noexcept { return prompt_tokens + completion_tokens; }
  std::size_t attributed_total() const noexcept { return attributed_prompt_tokens + attributed_completion_tokens; }
  StageUsage& operator+=(const StageUsage& o) noexcept;
};

struct UsageReport {
  std::map<Stage, StageUsage> stages;
  StageUsage total;

  StageUsage stage(Stage s) const;
};

UsageReport usage_report(std::span<const LedgerEntry> entries);

/// Attributed tokens and call counts per stage; independent of cache state,
/// so warm and cold runs serialize identically.
nlohmann::ordered_json attributed_json(const UsageReport& r);

/// Charged tokens and cache hits per stage.
nlohmann::ordered_json charged_json(const UsageReport& r);

}  // namespace zeroed::llm

#include "zeroed/llm/ledger.hpp"

namespace zeroed::llm {

void Ledger::record(const LedgerEntry& e) {
  std::lock_guard lock(mu_);
  entries_.push_back(e);
}

std::vector<LedgerEntry> Ledger::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

void Ledger::clear() {
  std::lock_guard lock(mu_);
  entries_.clear();
}

StageUsage& StageUsage::operator+=(const StageUsage& o) noexcept {
  calls += o.calls;
  cache_hits += o.cache_hits;
  prompt_tokens += o.prompt_tokens;
  completion_tokens += o.completion_tokens;
  attributed_prompt_tokens += o.attributed_prompt_tokens;
  attributed_completion_tokens += o.attributed_completion_tokens;
  return *this;
}

StageUsage UsageReport::stage(Stage s) const {
  const auto it = stages.find(s);
  return it == stages.end() ? StageUsage{} : it->second;
}

UsageReport usage_report(std::span<const LedgerEntry> entries) {
  UsageReport r;
  for (const auto& e : entries) {
    auto& u = r.stages[e.stage];
    ++u.calls;
    u.attributed_prompt_tokens += e.prompt_tokens;
    u.attributed_completion_tokens += e.completion_tokens;
    if (e.cached) {
      ++u.cache_hits;
    } else {
      u.prompt_tokens += e.prompt_tokens;
      u.completion_tokens += e.completion_tokens;
    }
  }
  for (const auto& [stage, u] : r.stages) r.total += u;
  return r;
}

nlohmann::ordered_json attributed_json(const UsageReport& r) {
  nlohmann::ordered_json out;
  auto& stages = out["stages"];
  stages = nlohmann::ordered_json::object();
  for (const auto s : kAllStages) {
    const auto u = r.stage(s);
    stages[to_string(s)] = {{"calls", u.calls},
                            {"prompt_tokens", u.attributed_prompt_tokens},
                            {"completion_tokens", u.attributed_completion_tokens}};
  }
  out["total"] = {{"calls", r.total.calls},
                  {"prompt_tokens", r.total.attributed_prompt_tokens},
                  {"completion_tokens", r.total.attributed_completion_tokens}};
  return out;
}

nlohmann::ordered_json charged_json(const UsageReport& r) {
  nlohmann::ordered_json out;
  auto& stages = out["stages"];
  stages = nlohmann::ordered_json::object();
  for (const auto s : kAllStages) {
    const auto u = r.stage(s);
    stages[to_string(s)] = {{"calls", u.calls},
                            {"cache_hits", u.cache_hits},
                            {"prompt_tokens", u.prompt_tokens},
                            {"completion_tokens", u.completion_tokens}};
  }
  out["total"] = {{"calls", r.total.calls},
                  {"cache_hits", r.total.cache_hits},
                  {"prompt_tokens", r.total.prompt_tokens},
                  {"completion_tokens", r.total.completion_tokens}};
  return out;
}

}  // namespace zeroed::llm

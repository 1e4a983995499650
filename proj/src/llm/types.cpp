#include "zeroed/llm/types.hpp"

namespace zeroed::llm {

const char* to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Criteria: return "criteria";
    case Stage::Probes: return "probes";
    case Stage::Guideline: return "guideline";
    case Stage::Labeling: return "labeling";
    case Stage::Refine: return "refine";
    case Stage::Augment: return "augment";
  }
  return "unknown";
}

std::optional<Stage> stage_from_string(std::string_view name) noexcept {
  for (const auto s : kAllStages) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::size_t estimate_tokens(std::string_view text) noexcept { return (text.size() + 3) / 4; }

}  // namespace zeroed::llm

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "zeroed/core/error.hpp"

namespace zeroed::llm {

enum class Stage { Criteria, Probes, Guideline, Labeling, Refine, Augment };

inline constexpr std::array<Stage, 6> kAllStages = {Stage::Criteria, Stage::Probes,  Stage::Guideline,
                                                    Stage::Labeling, Stage::Refine, Stage::Augment};

const char* to_string(Stage s) noexcept;
std::optional<Stage> stage_from_string(std::string_view name) noexcept;

struct PromptRequest {
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.0;
  int max_output_tokens = 4096;
  Stage tag = Stage::Labeling;
};

struct CompletionResponse {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  bool cached = false;
};

/// Offline token estimate: ceil(chars / 4).
std::size_t estimate_tokens(std::string_view text) noexcept;

/// Transport or provider failure that survived the retry policy.
class LlmError : public Error {
 public:
  using Error::Error;
};

}  // namespace zeroed::llm

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "zeroed/llm/types.hpp"

namespace zeroed::llm {

/// SHA-256 (hex) over model, system, user and temperature, each
/// length-prefixed so field boundaries cannot collide.
std::string cache_key(const PromptRequest& req);

/// One JSON file per request key under a directory. Writes are atomic, so
/// concurrent writers of the same key leave a complete file behind.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<CompletionResponse> lookup(const PromptRequest& req) const;
  void store(const PromptRequest& req, const CompletionResponse& resp) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path dir_;
};

}  // namespace zeroed::llm

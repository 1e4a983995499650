#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "zeroed/llm/types.hpp"

namespace zeroed {
class Dataset;
}

namespace zeroed::llm {

class Provider {
 public:
  virtual ~Provider() = default;
  virtual CompletionResponse complete(const PromptRequest& req) = 0;
  /// False when calls must be issued one at a time in submission order.
  virtual bool thread_safe() const noexcept { return true; }
  virtual std::string name() const = 0;
};

/// OpenAI-compatible `/chat/completions` over HTTP(S). The API key is read
/// from the named environment variable at construction. Transport errors,
/// 429 and 5xx are retried (3 attempts, exponential backoff).
class HttpProvider final : public Provider {
 public:
  HttpProvider(std::string endpoint, const std::string& api_key_env, int timeout_seconds = 120);
  CompletionResponse complete(const PromptRequest& req) override;
  std::string name() const override { return "http"; }

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  int timeout_seconds_;
};

/// Replays fixture responses per stage. Responses pushed in memory are used
/// first; otherwise `<dir>/<stage>-<n>.txt` for the n-th call of that stage
/// (1-based), falling back to `<dir>/<stage>.txt`. Missing fixtures throw.
class ScriptedProvider final : public Provider {
 public:
  explicit ScriptedProvider(std::filesystem::path fixtures = {});
  void push(Stage stage, std::string text);
  CompletionResponse complete(const PromptRequest& req) override;
  bool thread_safe() const noexcept override { return false; }
  std::string name() const override { return "scripted"; }

 private:
  std::filesystem::path dir_;
  std::mutex mu_;
  std::map<Stage, std::deque<std::string>> queued_;
  std::map<Stage, std::size_t> calls_;
};

/// Returns the same text for every request of a stage (default text otherwise).
class CannedProvider final : public Provider {
 public:
  explicit CannedProvider(std::string default_text, std::map<Stage, std::string> per_stage = {});
  CompletionResponse complete(const PromptRequest& req) override;
  std::string name() const override { return "canned"; }

 private:
  std::string default_text_;
  std::map<Stage, std::string> per_stage_;
};

/// Token counts for offline providers.
CompletionResponse offline_response(const PromptRequest& req, std::string text);

struct ProviderConfig {
  enum class Kind { Http, Oracle, Scripted, Canned };
  Kind kind = Kind::Oracle;
  std::string endpoint;
  std::string api_key_env = "ZEROED_API_KEY";
  int timeout_seconds = 120;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path fixtures;
  std::string canned_text = "[]";
};

const char* to_string(ProviderConfig::Kind k) noexcept;
/// Throws ConfigError for unknown names.
ProviderConfig::Kind provider_kind_from_string(const std::string& name);

/// Builds the configured provider. The oracle needs both tables; throws
/// ConfigError when a required input is missing.
std::shared_ptr<Provider> make_provider(const ProviderConfig& cfg, const Dataset* dirty, const Dataset* clean);

}  // namespace zeroed::llm

#include "zeroed/llm/provider.hpp"

#include "zeroed/core/dataset.hpp"
#include "zeroed/core/files.hpp"
#include "zeroed/llm/oracle.hpp"

namespace zeroed::llm {

CompletionResponse offline_response(const PromptRequest& req, std::string text) {
  CompletionResponse r;
  r.prompt_tokens = estimate_tokens(req.system) + estimate_tokens(req.user);
  r.completion_tokens = estimate_tokens(text);
  r.text = std::move(text);
  return r;
}

ScriptedProvider::ScriptedProvider(std::filesystem::path fixtures) : dir_(std::move(fixtures)) {}

void ScriptedProvider::push(Stage stage, std::string text) {
  std::lock_guard lock(mu_);
  queued_[stage].push_back(std::move(text));
}

CompletionResponse ScriptedProvider::complete(const PromptRequest& req) {
  std::lock_guard lock(mu_);
  const std::size_t n = ++calls_[req.tag];
  auto& queue = queued_[req.tag];
  if (!queue.empty()) {
    std::string text = std::move(queue.front());
    queue.pop_front();
    return offline_response(req, std::move(text));
  }
  if (!dir_.empty()) {
    const std::string stage = to_string(req.tag);
    const auto numbered = dir_ / (stage + "-" + std::to_string(n) + ".txt");
    if (std::filesystem::exists(numbered)) return offline_response(req, read_file(numbered));
    const auto fallback = dir_ / (stage + ".txt");
    if (std::filesystem::exists(fallback)) return offline_response(req, read_file(fallback));
  }
  throw LlmError(std::string("no scripted response for stage ") + to_string(req.tag) + " call " +
                 std::to_string(n));
}

CannedProvider::CannedProvider(std::string default_text, std::map<Stage, std::string> per_stage)
    : default_text_(std::move(default_text)), per_stage_(std::move(per_stage)) {}

CompletionResponse CannedProvider::complete(const PromptRequest& req) {
  const auto it = per_stage_.find(req.tag);
  return offline_response(req, it == per_stage_.end() ? default_text_ : it->second);
}

const char* to_string(ProviderConfig::Kind k) noexcept {
  switch (k) {
    case ProviderConfig::Kind::Http: return "http";
    case ProviderConfig::Kind::Oracle: return "oracle";
    case ProviderConfig::Kind::Scripted: return "scripted";
    case ProviderConfig::Kind::Canned: return "canned";
  }
  return "unknown";
}

ProviderConfig::Kind provider_kind_from_string(const std::string& name) {
  for (const auto k : {ProviderConfig::Kind::Http, ProviderConfig::Kind::Oracle, ProviderConfig::Kind::Scripted,
                       ProviderConfig::Kind::Canned}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown provider '" + name + "' (expected http, oracle, scripted or canned)");
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& cfg, const Dataset* dirty, const Dataset* clean) {
  switch (cfg.kind) {
    case ProviderConfig::Kind::Http:
      return std::make_shared<HttpProvider>(cfg.endpoint, cfg.api_key_env, cfg.timeout_seconds);
    case ProviderConfig::Kind::Oracle:
      if (dirty == nullptr || clean == nullptr) throw ConfigError("the oracle provider needs ground truth");
      return std::make_shared<OracleProvider>(*dirty, *clean, cfg.noise, cfg.seed);
    case ProviderConfig::Kind::Scripted:
      if (cfg.fixtures.empty()) throw ConfigError("the scripted provider needs a fixtures directory");
      return std::make_shared<ScriptedProvider>(cfg.fixtures);
    case ProviderConfig::Kind::Canned: return std::make_shared<CannedProvider>(cfg.canned_text);
  }
  throw ConfigError("unknown provider kind");
}

}  // namespace zeroed::llm

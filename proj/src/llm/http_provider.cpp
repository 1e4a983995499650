#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "zeroed/llm/provider.hpp"

namespace zeroed::llm {

namespace {

constexpr int kAttempts = 3;
constexpr auto kFirstBackoff = std::chrono::milliseconds(500);

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpProvider::HttpProvider(std::string endpoint, const std::string& api_key_env, int timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
  if (endpoint.empty()) throw ConfigError("http provider needs an endpoint URL");
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must start with http:// or https://");
  const auto path_start = endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : endpoint.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
  const char* key = std::getenv(api_key_env.c_str());
  if (key == nullptr || *key == '\0') throw ConfigError("environment variable " + api_key_env + " is not set");
  api_key_ = key;
}

CompletionResponse HttpProvider::complete(const PromptRequest& req) {
  nlohmann::json body;
  body["model"] = req.model;
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_output_tokens;
  body["messages"] = nlohmann::json::array();
  if (!req.system.empty()) body["messages"].push_back({{"role", "system"}, {"content", req.system}});
  body["messages"].push_back({{"role", "user"}, {"content", req.user}});
  const std::string payload = body.dump();

  httplib::Client client(scheme_host_port_);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_write_timeout(timeout_seconds_, 0);
  client.set_connection_timeout(30, 0);
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  std::string last_error;
  auto backoff = kFirstBackoff;
  for (int attempt = 1; attempt <= kAttempts; ++attempt) {
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status >= 200 && res->status < 300) {
      const auto j = nlohmann::json::parse(res->body, nullptr, false);
      if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
        throw LlmError("malformed completion response from " + scheme_host_port_);
      }
      CompletionResponse out;
      out.text = j["choices"][0]["message"].value("content", std::string{});
      if (j.contains("usage") && j["usage"].is_object()) {
        out.prompt_tokens = j["usage"].value("prompt_tokens", std::size_t{0});
        out.completion_tokens = j["usage"].value("completion_tokens", std::size_t{0});
      } else {
        out.prompt_tokens = estimate_tokens(req.system) + estimate_tokens(req.user);
        out.completion_tokens = estimate_tokens(out.text);
      }
      return out;
    } else if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      throw LlmError("HTTP " + std::to_string(res->status) + " from " + scheme_host_port_ + path_ + ": " +
                     res->body.substr(0, 200));
    }
    if (attempt < kAttempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw LlmError("completion failed after " + std::to_string(kAttempts) + " attempts: " + last_error);
}

}  // namespace zeroed::llm

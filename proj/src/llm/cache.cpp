#include "zeroed/llm/cache.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "json.hpp"
#include "zeroed/core/files.hpp"

namespace zeroed::llm {

namespace {

void feed(EVP_MD_CTX* ctx, std::string_view field) {
  const auto len = static_cast<unsigned long long>(field.size());
  std::array<unsigned char, 8> prefix{};
  for (std::size_t b = 0; b < 8; ++b) prefix[b] = static_cast<unsigned char>(len >> (8 * b));
  EVP_DigestUpdate(ctx, prefix.data(), prefix.size());
  EVP_DigestUpdate(ctx, field.data(), field.size());
}

}  // namespace

std::string cache_key(const PromptRequest& req) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw LlmError("cannot allocate digest context");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char temp[64];
  std::snprintf(temp, sizeof temp, "%.17g", req.temperature);
  feed(ctx, req.model);
  feed(ctx, req.system);
  feed(ctx, req.user);
  feed(ctx, temp);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int b = 0; b < len; ++b) {
    hex.push_back(kHex[digest[b] >> 4]);
    hex.push_back(kHex[digest[b] & 0xF]);
  }
  return hex;
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<CompletionResponse> ResponseCache::lookup(const PromptRequest& req) const {
  const auto path = path_for(cache_key(req));
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    CompletionResponse r;
    r.text = j.at("text").get<std::string>();
    r.prompt_tokens = j.at("prompt_tokens").get<std::size_t>();
    r.completion_tokens = j.at("completion_tokens").get<std::size_t>();
    r.cached = true;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entry: treat as a miss and overwrite
  }
}

void ResponseCache::store(const PromptRequest& req, const CompletionResponse& resp) const {
  nlohmann::ordered_json j;
  j["model"] = req.model;
  j["stage"] = to_string(req.tag);
  j["text"] = resp.text;
  j["prompt_tokens"] = resp.prompt_tokens;
  j["completion_tokens"] = resp.completion_tokens;
  write_file_atomic(path_for(cache_key(req)), j.dump(2) + "\n");
}

}  // namespace zeroed::llm

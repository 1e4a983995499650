#include "zeroed/llm/gateway.hpp"

#include <cstdio>
#include <exception>
#include <thread>

#include "zeroed/core/files.hpp"

namespace zeroed::llm {

Gateway::Gateway(std::shared_ptr<Provider> provider, GatewayOptions options)
    : provider_(std::move(provider)), options_(std::move(options)) {
  if (!provider_) throw InvalidArgument("gateway needs a provider");
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
  if (!options_.cache_dir.empty()) cache_.emplace(options_.cache_dir);
}

CompletionResponse Gateway::run_one(const PromptRequest& req, std::size_t seq) {
  CompletionResponse resp;
  if (auto hit = cache_ ? cache_->lookup(req) : std::nullopt) {
    resp = std::move(*hit);
  } else {
    resp = provider_->complete(req);
    resp.cached = false;
    ++provider_calls_;
    if (cache_) cache_->store(req, resp);
  }
  ledger_.record(LedgerEntry{req.tag, resp.prompt_tokens, resp.completion_tokens, resp.cached});
  write_audit(req, resp, seq);
  return resp;
}

void Gateway::write_audit(const PromptRequest& req, const CompletionResponse& resp, std::size_t seq) const {
  if (options_.audit_dir.empty()) return;
  char name[64];
  std::snprintf(name, sizeof name, "%05zu_%s.txt", seq, to_string(req.tag));
  std::string body;
  body += "=== model\n" + req.model + "\n";
  body += "=== system\n" + req.system + "\n";
  body += "=== user\n" + req.user + "\n";
  body += "=== response\n" + resp.text + "\n";
  write_file_atomic(options_.audit_dir / name, body);
}

CompletionResponse Gateway::complete(const PromptRequest& req) { return run_one(req, next_seq_++); }

std::vector<CompletionResponse> Gateway::complete_all(std::span<const PromptRequest> reqs) {
  std::vector<CompletionResponse> out(reqs.size());
  const std::size_t base = next_seq_.fetch_add(reqs.size());
  const std::size_t workers =
      provider_->thread_safe() ? std::min(options_.max_in_flight, reqs.size()) : std::size_t{1};
  if (workers <= 1) {
    for (std::size_t k = 0; k < reqs.size(); ++k) out[k] = run_one(reqs[k], base + k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(reqs.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < reqs.size(); k = next++) {
        try {
          out[k] = run_one(reqs[k], base + k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace zeroed::llm

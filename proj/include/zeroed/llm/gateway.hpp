#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "zeroed/llm/cache.hpp"
#include "zeroed/llm/ledger.hpp"
#include "zeroed/llm/provider.hpp"

namespace zeroed::llm {

struct GatewayOptions {
  std::size_t max_in_flight = 4;
  std::filesystem::path cache_dir;  // empty: no cache
  std::filesystem::path audit_dir;  // empty: no audit files
};

/// Front door for every LLM call: cache lookup, provider call, ledger entry
/// and an audit file `<audit_dir>/<seq>_<stage>.txt` per call. Sequence
/// numbers follow submission order, so audit trails are reproducible.
class Gateway {
 public:
  Gateway(std::shared_ptr<Provider> provider, GatewayOptions options = {});

  CompletionResponse complete(const PromptRequest& req);

  /// Issues up to max_in_flight requests concurrently (one at a time for
  /// providers that are not thread-safe). Results are in request order.
  std::vector<CompletionResponse> complete_all(std::span<const PromptRequest> reqs);

  const Ledger& ledger() const noexcept { return ledger_; }
  std::size_t provider_calls() const noexcept { return provider_calls_.load(); }
  Provider& provider() noexcept { return *provider_; }

 private:
  CompletionResponse run_one(const PromptRequest& req, std::size_t seq);
  void write_audit(const PromptRequest& req, const CompletionResponse& resp, std::size_t seq) const;

  std::shared_ptr<Provider> provider_;
  GatewayOptions options_;
  std::optional<ResponseCache> cache_;
  Ledger ledger_;
  std::atomic<std::size_t> next_seq_{0};
  std::atomic<std::size_t> provider_calls_{0};
};

}  // namespace zeroed::llm

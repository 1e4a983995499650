#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"
#include "zeroed/annotator/annotator.hpp"
#include "zeroed/annotator/prompts.hpp"
#include "zeroed/core/inject.hpp"
#include "zeroed/core/synthetic.hpp"
#include "zeroed/llm/cache.hpp"
#include "zeroed/llm/gateway.hpp"
#include "zeroed/llm/oracle.hpp"
#include "zeroed/llm/structured.hpp"

using namespace zeroed;
using namespace zeroed::llm;

namespace {

PromptRequest req(std::string user, Stage tag = Stage::Labeling) {
  PromptRequest r;
  r.model = "m";
  r.system = "sys";
  r.user = std::move(user);
  r.tag = tag;
  return r;
}

// Counts calls; thread-safe.
class CountingProvider final : public Provider {
 public:
  CompletionResponse complete(const PromptRequest& r) override {
    ++calls;
    CompletionResponse c;
    c.text = "echo:" + r.user;
    c.prompt_tokens = 100;
    c.completion_tokens = 50;
    return c;
  }
  std::string name() const override { return "counting"; }
  std::atomic<int> calls{0};
};

}  // namespace

TEST_SUITE("llm") {

TEST_CASE("structured output extraction") {
  CHECK(extract_structured("```json\n[1, 2]\n```", Shape::Array) == nlohmann::json::array({1, 2}));
  CHECK(extract_structured("Sure! Here it is: {\"a\": 1} hope that helps", Shape::Object)["a"] == 1);
  CHECK(extract_structured("{\"labels\": [3]}", Shape::Array) == nlohmann::json::array({3}));
  CHECK(extract_structured("noise [oops {\"x\": [1]}", Shape::Object)["x"][0] == 1);
  CHECK_THROWS_AS(extract_structured("[1, 2", Shape::Array), StructuredOutputError);
  CHECK_THROWS_AS(extract_structured("no json here", Shape::Object), StructuredOutputError);
  CHECK_THROWS_AS(extract_structured("{\"a\": 1, \"b\": 2}", Shape::Array), StructuredOutputError);
}

TEST_CASE("cache keys separate every field") {
  auto a = req("ab");
  auto b = req("ab");
  CHECK(cache_key(a) == cache_key(b));
  b.system = "sysa";
  b.user = "b";
  CHECK(cache_key(a) != cache_key(b));
  b = a;
  b.temperature = 0.5;
  CHECK(cache_key(a) != cache_key(b));
  b = a;
  b.model = "m2";
  CHECK(cache_key(a) != cache_key(b));
}

TEST_CASE("second identical request is served from cache") {
  testing::TempDir dir("cache");
  auto provider = std::make_shared<CountingProvider>();
  Gateway gw(provider, {2, dir / "cache", dir / "audit"});
  const auto first = gw.complete(req("hello"));
  const auto second = gw.complete(req("hello"));
  CHECK_FALSE(first.cached);
  CHECK(second.cached);
  CHECK(second.text == first.text);
  CHECK(provider->calls == 1);
  const auto usage = usage_report(gw.ledger().entries());
  CHECK(usage.total.calls == 2);
  CHECK(usage.total.cache_hits == 1);
  CHECK(usage.total.prompt_tokens == 100);
  CHECK(usage.total.attributed_prompt_tokens == 200);
  CHECK(std::filesystem::exists(dir / "audit" / "00000_labeling.txt"));
  CHECK(std::filesystem::exists(dir / "audit" / "00001_labeling.txt"));

  Gateway warm(provider, {2, dir / "cache", {}});
  warm.complete(req("hello"));
  const auto wu = usage_report(warm.ledger().entries());
  CHECK(wu.total.charged_total() == 0);
  CHECK(wu.total.cache_hits == wu.total.calls);
  CHECK(warm.provider_calls() == 0);
}

TEST_CASE("concurrent batches keep request order") {
  auto provider = std::make_shared<CountingProvider>();
  Gateway gw(provider, {4, {}, {}});
  std::vector<PromptRequest> reqs;
  for (int k = 0; k < 25; ++k) reqs.push_back(req("q" + std::to_string(k)));
  const auto out = gw.complete_all(reqs);
  REQUIRE(out.size() == 25);
  for (int k = 0; k < 25; ++k) CHECK(out[k].text == "echo:q" + std::to_string(k));
  CHECK(provider->calls == 25);
}

TEST_CASE("ledger totals") {
  CHECK(usage_report({}).total.calls == 0);
  CHECK(usage_report({}).total.attributed_total() == 0);
  const std::vector<LedgerEntry> two = {{Stage::Labeling, 100, 50, false}, {Stage::Labeling, 100, 50, false}};
  const auto r = usage_report(two);
  CHECK(r.stage(Stage::Labeling).prompt_tokens == 200);
  CHECK(r.stage(Stage::Labeling).completion_tokens == 100);
  CHECK(r.stage(Stage::Criteria).calls == 0);
}

TEST_CASE("grand totals equal the sum of stage totals (property)") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    std::vector<LedgerEntry> entries;
    for (std::size_t k = rng.below(40); k > 0; --k) {
      entries.push_back({kAllStages[rng.below(kAllStages.size())], rng.below(5000), rng.below(800), rng.chance(0.3)});
    }
    const auto r = usage_report(entries);
    StageUsage sum;
    for (const auto s : kAllStages) sum += r.stage(s);
    CHECK(sum.calls == r.total.calls);
    CHECK(sum.cache_hits == r.total.cache_hits);
    CHECK(sum.prompt_tokens == r.total.prompt_tokens);
    CHECK(sum.completion_tokens == r.total.completion_tokens);
    CHECK(sum.attributed_prompt_tokens == r.total.attributed_prompt_tokens);
    CHECK(sum.attributed_completion_tokens == r.total.attributed_completion_tokens);
  }
}

TEST_CASE("scripted provider replays fixtures verbatim") {
  testing::TempDir dir("scripted");
  std::ofstream(dir / "labeling-2.txt") << "second answer";
  std::ofstream(dir / "labeling.txt") << "fallback answer";
  ScriptedProvider p(dir.path());
  p.push(Stage::Labeling, "queued");
  CHECK(p.complete(req("x")).text == "queued");
  CHECK(p.complete(req("x")).text == "second answer");  // calls count queued answers too
  CHECK(p.complete(req("x")).text == "fallback answer");
  CHECK_THROWS_AS(p.complete(req("x", Stage::Criteria)), LlmError);
}

TEST_CASE("oracle labels agree with the dirty/clean diff") {
  const auto clean = make_synthetic_people(200, 3);
  const auto inj = inject_errors(clean, benchmark_injection_spec(3));
  OracleProvider oracle(inj.dirty, clean, 0.0, 1);
  for (std::size_t j = 0; j < clean.num_attributes(); ++j) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < 200; i += 10) rows.push_back(i);
    const auto prompt = annotator::prompts::labeling(inj.dirty, j, "guideline", rows, {});
    const auto resp = oracle.complete(req(prompt));
    const auto labels = annotator::parse_labels(resp.text, j, rows);
    REQUIRE(labels);
    for (const auto& l : *labels) CHECK(l.error == inj.mask.get(l.row, j));
    for (const auto i : rows) CHECK(oracle.says_error(i, j) == inj.mask.get(i, j));
  }
}

TEST_CASE("oracle criteria parse and hold on the clean table") {
  const auto clean = make_synthetic_people(300, 4);
  const auto inj = inject_errors(clean, benchmark_injection_spec(4));
  OracleProvider oracle(inj.dirty, clean, 0.0, 1);
  for (std::size_t j = 0; j < clean.num_attributes(); ++j) {
    const auto exprs = oracle.criteria_for(j);
    CHECK_FALSE(exprs.empty());
    CHECK(exprs.size() <= 8);
    for (const auto& e : exprs) {
      const auto c = criteria::compile({clean.attribute(j), "c", "", e}, clean.attributes());
      std::vector<std::size_t> all(clean.num_rows());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      CHECK(criteria::criterion_accuracy(c, clean, j, all).accuracy_on_right == 1.0);
    }
  }
}

TEST_CASE("oracle noise flips a deterministic fraction of labels") {
  const auto clean = make_synthetic_people(500, 5);
  const auto inj = inject_errors(clean, benchmark_injection_spec(5));
  OracleProvider noisy(inj.dirty, clean, 0.2, 9);
  OracleProvider same(inj.dirty, clean, 0.2, 9);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    flips += noisy.says_error(i, 0) != inj.mask.get(i, 0);
    CHECK(noisy.says_error(i, 0) == same.says_error(i, 0));
  }
  CHECK(flips > 60);
  CHECK(flips < 140);
}

TEST_CASE("http provider talks to an OpenAI-compatible endpoint") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth, seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& r, httplib::Response& res) {
    // The first call fails with a retryable status.
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    seen_auth = r.get_header_value("Authorization");
    seen_body = r.body;
    res.set_content(R"({"choices":[{"message":{"content":"[\"ok\"]"}}],"usage":{"prompt_tokens":12,"completion_tokens":3}})",
                    "application/json");
  });
  server.Post("/bad/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("ZEROED_TEST_KEY", "secret", 1);
  HttpProvider p("http://127.0.0.1:" + std::to_string(port) + "/v1", "ZEROED_TEST_KEY", 5);
  const auto r = p.complete(req("hello", Stage::Criteria));
  CHECK(r.text == "[\"ok\"]");
  CHECK(r.prompt_tokens == 12);
  CHECK(r.completion_tokens == 3);
  CHECK(hits == 2);
  CHECK(seen_auth == "Bearer secret");
  const auto body = nlohmann::json::parse(seen_body);
  CHECK(body["model"] == "m");
  CHECK(body["messages"][1]["content"] == "hello");

  HttpProvider bad("http://127.0.0.1:" + std::to_string(port) + "/bad", "ZEROED_TEST_KEY", 5);
  CHECK_THROWS_AS(bad.complete(req("x")), LlmError);
  server.stop();
  th.join();

  unsetenv("ZEROED_MISSING_KEY");
  CHECK_THROWS_AS(HttpProvider("http://localhost:1/v1", "ZEROED_MISSING_KEY"), ConfigError);
  CHECK_THROWS_AS(HttpProvider("localhost/v1", "ZEROED_TEST_KEY"), ConfigError);
}

}  // TEST_SUITE

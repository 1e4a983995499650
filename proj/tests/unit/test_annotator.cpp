#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "zeroed/annotator/annotator.hpp"
#include "zeroed/annotator/error_types.hpp"
#include "zeroed/annotator/probes.hpp"
#include "zeroed/annotator/prompts.hpp"
#include "zeroed/core/inject.hpp"
#include "zeroed/core/synthetic.hpp"
#include "zeroed/llm/gateway.hpp"
#include "zeroed/llm/oracle.hpp"

using namespace zeroed;
using namespace zeroed::annotator;
using zeroed::testing::table;

namespace {

struct Scripted {
  std::shared_ptr<llm::ScriptedProvider> provider = std::make_shared<llm::ScriptedProvider>();
  llm::Gateway gateway{provider};
};

Dataset hours() {
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 30; ++i) rows.push_back({std::to_string(i % 24), i % 3 ? "a" : "b"});
  return table({"Hour", "Flag"}, rows);
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("annotator") {

TEST_CASE("probe selection follows the scripted answer") {
  const auto ds = hours();
  Scripted s;
  s.provider->push(llm::Stage::Probes, R"([{"kind":"top_values","limit":5},{"kind":"null_rate"}])");
  Annotator ann(ds, s.gateway, {});
  const auto probes = ann.propose_probes(0, ann.sample_rows(0));
  REQUIRE(probes.size() == 2);
  CHECK(probes[0].kind == ProbeKind::TopValues);
  CHECK(probes[0].limit == 5);
  CHECK(probes[1].kind == ProbeKind::NullRate);
}

TEST_CASE("unknown probe kinds are dropped and bad answers fall back") {
  const auto ds = hours();
  Scripted s;
  s.provider->push(llm::Stage::Probes, R"([{"kind":"entropy"},{"kind":"rare_values","limit":500}])");
  s.provider->push(llm::Stage::Probes, "I would look at the values.");
  s.provider->push(llm::Stage::Probes, "[]");
  Annotator ann(ds, s.gateway, {});
  const auto kept = ann.propose_probes(0, ann.sample_rows(0));
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].kind == ProbeKind::RareValues);
  CHECK(kept[0].limit == kMaxProbeLimit);
  CHECK(ann.propose_probes(0, ann.sample_rows(0)) == default_probes(0));
  CHECK(ann.propose_probes(0, ann.sample_rows(0)) == default_probes(0));
}

TEST_CASE("probe results by hand") {
  const auto ds = zeroed::testing::single_column("c", {"A", "A", "B", ""});
  const auto top = run_probe(ds, {ProbeKind::TopValues, 0, 2});
  REQUIRE(top.rows.size() == 2);
  CHECK(top.rows[0].key == "A");
  CHECK(top.rows[0].value == 2);
  // B and "" tie at 1; key order puts "" first.
  CHECK(top.rows[1].key.empty());
  const auto three = zeroed::testing::single_column("c", {"A", "A", "B"});
  const auto t3 = run_probe(three, {ProbeKind::TopValues, 0, 2});
  CHECK(t3.rows[1].key == "B");
  CHECK(t3.rows[1].value == 1);
  CHECK(run_probe(ds, {ProbeKind::NullRate, 0}).rows.at(0).value == 0.25);
  const auto uniform = zeroed::testing::single_column("z", {"12345", "67890", "11111"});
  const auto hist = run_probe(uniform, {ProbeKind::PatternHistogram, 0, 20, 3});
  REQUIRE(hist.rows.size() == 1);
  CHECK(hist.rows[0].key == "D[5]");
  CHECK(hist.rows[0].value == 3);
  const auto nums = zeroed::testing::single_column("n", {"1", "3", "x", "8"});
  const auto summary = run_probe(nums, {ProbeKind::NumericSummary, 0});
  auto value_of = [&](const std::string& k) {
    return std::find_if(summary.rows.begin(), summary.rows.end(), [&](const ProbeRow& r) { return r.key == k; })->value;
  };
  CHECK(value_of("numeric_count") == 3);
  CHECK(value_of("non_numeric_count") == 1);
  CHECK(value_of("min") == 1);
  CHECK(value_of("median") == 3);
  CHECK(value_of("mean") == 4);
  CHECK(value_of("max") == 8);
}

TEST_CASE("probe result size is bounded by the limit") {
  std::vector<std::string> v;
  for (int i = 0; i < 500; ++i) v.push_back("v" + std::to_string(i));
  const auto ds = zeroed::testing::single_column("c", v);
  nlohmann::json j = {{"kind", "rare_values"}, {"limit", 10000}};
  const auto p = probe_from_json(j, ds, 0);
  REQUIRE(p);
  CHECK(run_probe(ds, *p).rows.size() == kMaxProbeLimit);
  CHECK_FALSE(probe_from_json({{"kind", "top_values"}, {"limit", 0}}, ds, 0));
  CHECK_FALSE(probe_from_json({{"kind", "pattern_histogram"}, {"level", 4}}, ds, 0));
  CHECK_FALSE(probe_from_json({{"kind", "co_occurrence"}, {"attr_b", "c"}}, ds, 0));
}

TEST_CASE("guideline prompt carries error types and every probe result") {
  const auto ds = make_synthetic_people(80, 2);
  std::vector<ProbeResult> results;
  results.push_back(run_probe(ds, {ProbeKind::TopValues, 0, 7}));
  results.push_back(run_probe(ds, {ProbeKind::PatternHistogram, 0, 20, 2}));
  results.push_back(run_probe(ds, {ProbeKind::NullRate, 0}));
  const std::vector<std::size_t> rows{1, 5, 9};
  const std::vector<std::size_t> corr{1, 2};
  const auto prompt = prompts::guideline(ds, 0, results, rows, corr);
  for (const auto& t : kErrorTypes) CHECK(prompt.find(t.name) != std::string::npos);
  for (const auto& r : results) {
    CHECK(prompt.find("(" + std::to_string(r.rows.size()) + " rows)") != std::string::npos);
    CHECK(prompt.find(format_probe_result(r, ds)) != std::string::npos);
  }
  CHECK(count_of(prompt, "[row ") == rows.size());
}

TEST_CASE("guideline is the scripted text; two blank answers abort") {
  const auto ds = hours();
  Scripted s;
  s.provider->push(llm::Stage::Guideline, "Hours run from 0 to 23.");
  s.provider->push(llm::Stage::Guideline, "   ");
  s.provider->push(llm::Stage::Guideline, "");
  Annotator ann(ds, s.gateway, {});
  const auto g = ann.build_guideline(0, {}, ann.sample_rows(0), {});
  CHECK(g.ok);
  CHECK(g.text == "Hours run from 0 to 23.");
  const auto bad = ann.build_guideline(0, {}, ann.sample_rows(0), {});
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.diagnostics.empty());
}

TEST_CASE("criteria proposal, repair and discard") {
  const auto ds = hours();
  Scripted s;
  s.provider->push(llm::Stage::Criteria, R"j(["is_number", "num_between(0, 23)", "not_empty"])j");
  s.provider->push(llm::Stage::Criteria, R"(["is_number", "num_between(0, 23", "not_empty"])");
  s.provider->push(llm::Stage::Criteria, R"j(["num_between(0, 23)"])j");
  s.provider->push(llm::Stage::Criteria, R"(["is_integer", "attr(\"Nope\") == value", "not_empty"])");
  s.provider->push(llm::Stage::Criteria, R"(["attr(\"Still nope\") == value"])");
  Annotator ann(ds, s.gateway, {});
  const auto rows = ann.sample_rows(0);

  const auto ok = ann.propose_criteria(0, rows);
  CHECK(ok.set.size() == 3);
  CHECK(ok.warnings.empty());

  const auto repaired = ann.propose_criteria(0, rows);
  CHECK(repaired.set.size() == 3);
  CHECK(repaired.repaired == 1);

  const auto dropped = ann.propose_criteria(0, rows);
  CHECK(dropped.set.size() == 2);
  CHECK(dropped.warnings.size() == 1);
}

TEST_CASE("criteria answers accept objects and cap the count") {
  const auto ds = hours();
  Scripted s;
  s.provider->push(llm::Stage::Criteria,
                   R"j([{"name":"hour_range","description":"clock hour","expr":"num_between(0, 23)"},
                       "is_number", "is_number", "is_integer", "not_empty", "len_between(1, 2)"])j");
  AnnotatorConfig cfg;
  cfg.max_criteria = 3;
  Annotator ann(ds, s.gateway, cfg);
  const auto out = ann.propose_criteria(0, ann.sample_rows(0));
  REQUIRE(out.set.size() == 3);
  CHECK(out.set.criteria[0].source.name == "hour_range");
  CHECK(out.set.criteria[0].source.description == "clock hour");
  CHECK(out.set.criteria[1].source.expr == "is_number");
  CHECK(out.set.criteria[2].source.expr == "is_integer");
}

TEST_CASE("oracle labeling: errors and clean cells, batches of 20") {
  const auto clean = make_synthetic_people(300, 6);
  const auto inj = inject_errors(clean, benchmark_injection_spec(6));
  auto oracle = std::make_shared<llm::OracleProvider>(inj.dirty, clean, 0.0, 1);
  llm::Gateway gw(oracle);
  Annotator ann(inj.dirty, gw, {});
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < 45; ++i) rows.push_back(i * 6);
  Guideline g{0, "look closely", true, ""};
  const auto out = ann.label_samples(0, g, rows, {});
  CHECK(out.batches == 3);
  CHECK(out.unlabeled.empty());
  REQUIRE(out.labels.size() == 45);
  std::size_t errors = 0;
  for (const auto& l : out.labels) {
    CHECK(l.error == inj.mask.get(l.row, 0));
    errors += l.error;
  }
  CHECK(errors > 0);
  CHECK(errors < 45);
  const auto usage = llm::usage_report(gw.ledger().entries());
  CHECK(usage.stage(llm::Stage::Labeling).calls == 3);
}

TEST_CASE("labeling batch split by batch size") {
  const auto ds = hours();
  Scripted s;
  auto answer = [](std::size_t from, std::size_t to) {
    nlohmann::json a = nlohmann::json::array();
    for (std::size_t i = from; i < to; ++i) a.push_back({{"row", i}, {"label", "right"}});
    return a.dump();
  };
  s.provider->push(llm::Stage::Labeling, answer(0, 20));
  s.provider->push(llm::Stage::Labeling, answer(20, 27));
  // Missing row 29: invalid, retried, then still invalid.
  s.provider->push(llm::Stage::Labeling, answer(27, 29));
  s.provider->push(llm::Stage::Labeling, "[]");
  std::vector<std::size_t> rows(30);
  for (std::size_t i = 0; i < 30; ++i) rows[i] = i;
  AnnotatorConfig cfg;
  cfg.batch_size = 20;
  Annotator ann(ds, s.gateway, cfg);
  const auto first = ann.label_samples(0, {0, "g", true, ""}, std::span(rows).first(27), {});
  CHECK(first.batches == 2);
  CHECK(first.labels.size() == 27);
  const auto second = ann.label_samples(0, {0, "g", true, ""}, std::span(rows).subspan(27), {});
  CHECK(second.retried_batches == 1);
  CHECK(second.labels.empty());
  CHECK(second.unlabeled == std::vector<std::size_t>{27, 28, 29});
}

TEST_CASE("label parsing requires a one-to-one labeling") {
  const std::vector<std::size_t> rows{3, 7};
  const auto ok = parse_labels(R"([{"row":7,"label":"correct"},{"row":"3","label":"error","reason":"typo"}])", 0, rows);
  REQUIRE(ok);
  CHECK(ok->size() == 2);
  CHECK_FALSE(parse_labels(R"([{"row":3,"label":"error"}])", 0, rows));
  CHECK_FALSE(parse_labels(R"([{"row":3,"label":"error"},{"row":3,"label":"right"}])", 0, rows));
  CHECK_FALSE(parse_labels(R"([{"row":3,"label":"error"},{"row":9,"label":"right"}])", 0, rows));
  CHECK_FALSE(parse_labels(R"([{"row":3,"label":"maybe"},{"row":7,"label":"right"}])", 0, rows));
  CHECK_FALSE(parse_labels("garbage", 0, rows));
}

TEST_CASE("labeling prompts grow with samples, not table size") {
  const auto small = make_synthetic_people(1000, 1);
  const auto large = make_synthetic_people(10000, 1);
  const std::vector<std::size_t> rows{0, 10, 20, 30, 40, 50, 60, 70, 80, 90};
  const std::vector<std::size_t> corr{1, 2};
  const auto a = prompts::labeling(small, 0, "guide", rows, corr);
  const auto b = prompts::labeling(large, 0, "guide", rows, corr);
  const double ratio = double(llm::estimate_tokens(b)) / double(llm::estimate_tokens(a));
  CHECK(ratio < 1.1);
  CHECK(ratio > 0.9);
}

TEST_CASE("sampled rows are seeded, sorted and distinct") {
  const auto ds = make_synthetic_people(500, 1);
  Scripted s;
  AnnotatorConfig cfg;
  cfg.seed = 4;
  Annotator ann(ds, s.gateway, cfg);
  const auto a = ann.sample_rows(2);
  CHECK(a.size() == cfg.criteria_sample);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
  CHECK(a == ann.sample_rows(2));
  CHECK(a != ann.sample_rows(3));
}

}  // TEST_SUITE

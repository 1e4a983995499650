#include "zeroed/annotator/annotator.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "zeroed/annotator/prompts.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/core/rng.hpp"
#include "zeroed/core/text.hpp"
#include "zeroed/criteria/parser.hpp"
#include "zeroed/llm/structured.hpp"

namespace zeroed::annotator {

namespace {

constexpr std::size_t kMaxProbes = 6;

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; });
}

std::optional<std::size_t> row_of(const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer()) {
    const auto x = v.get<long long>();
    if (x < 0) return std::nullopt;
    return static_cast<std::size_t>(x);
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(std::stoull(s));
  }
  return std::nullopt;
}

std::optional<bool> error_of(const nlohmann::json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) {
    const auto x = v.get<long long>();
    if (x == 0 || x == 1) return x == 1;
    return std::nullopt;
  }
  if (!v.is_string()) return std::nullopt;
  const auto s = to_lower_ascii(v.get<std::string>());
  if (s == "error" || s == "erroneous" || s == "1") return true;
  if (s == "right" || s == "correct" || s == "clean" || s == "0") return false;
  return std::nullopt;
}

std::vector<std::vector<std::size_t>> split_batches(std::span<const std::size_t> rows, std::size_t batch) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t b = 0; b < rows.size(); b += batch) {
    const auto end = std::min(rows.size(), b + batch);
    out.emplace_back(rows.begin() + static_cast<std::ptrdiff_t>(b), rows.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace

Annotator::Annotator(const Dataset& ds, llm::Gateway& gateway, AnnotatorConfig cfg)
    : ds_(ds), gateway_(gateway), cfg_(std::move(cfg)) {
  if (cfg_.batch_size == 0) throw ConfigError("batch size must be positive");
}

llm::PromptRequest Annotator::request(llm::Stage stage, std::string user) const {
  llm::PromptRequest req;
  req.model = cfg_.model;
  req.system = std::string(prompts::system_message());
  req.user = std::move(user);
  req.tag = stage;
  return req;
}

std::vector<std::size_t> Annotator::sample_rows(std::size_t attr) const {
  const std::size_t n = ds_.num_rows();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t take = std::min(cfg_.criteria_sample, n);
  Rng rng(hash_combine(cfg_.seed, attr));
  for (std::size_t k = 0; k < take; ++k) {
    const auto pick = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(idx[k], idx[pick]);
  }
  idx.resize(take);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<DistributionProbe> Annotator::propose_probes(std::size_t attr, std::span<const std::size_t> sample_rows) {
  const auto resp = gateway_.complete(request(llm::Stage::Probes, prompts::probes(ds_, attr, sample_rows)));
  std::vector<DistributionProbe> out;
  try {
    const auto arr = llm::extract_structured(resp.text, llm::Shape::Array);
    for (const auto& item : arr) {
      auto p = probe_from_json(item, ds_, attr);
      if (!p) {
        spdlog::debug("dropping invalid probe {} for {}", item.dump(), ds_.attribute(attr));
        continue;
      }
      if (std::find(out.begin(), out.end(), *p) == out.end()) out.push_back(*p);
      if (out.size() == kMaxProbes) break;
    }
  } catch (const llm::StructuredOutputError& e) {
    spdlog::warn("probe selection for {} unusable: {}", ds_.attribute(attr), e.what());
  }
  if (out.empty()) out = default_probes(attr);
  return out;
}

Guideline Annotator::build_guideline(std::size_t attr, std::span<const ProbeResult> results,
                                     std::span<const std::size_t> sample_rows,
                                     std::span<const std::size_t> correlates) {
  Guideline g;
  g.attr = attr;
  const auto rows = sample_rows.first(std::min(sample_rows.size(), cfg_.guideline_sample));
  const std::string prompt = prompts::guideline(ds_, attr, results, rows, correlates);
  auto resp = gateway_.complete(request(llm::Stage::Guideline, prompt));
  if (blank(resp.text)) {
    resp = gateway_.complete(request(llm::Stage::Guideline, prompt + prompts::retry_suffix("it was empty")));
  }
  if (blank(resp.text)) {
    g.diagnostics = "guideline for " + ds_.attribute(attr) + " was empty after one retry";
    return g;
  }
  g.text = resp.text;
  g.ok = true;
  return g;
}

CriteriaOutcome Annotator::propose_criteria(std::size_t attr, std::span<const std::size_t> sample_rows) {
  return request_criteria(attr, prompts::criteria(ds_, attr, sample_rows, cfg_.max_criteria), llm::Stage::Criteria,
                          criteria::Origin::Initial);
}

CriteriaOutcome Annotator::request_criteria(std::size_t attr, const std::string& prompt, llm::Stage stage,
                                            criteria::Origin origin) {
  CriteriaOutcome out;
  out.set.attr = ds_.attribute(attr);
  const auto& schema = ds_.attributes();

  // Parses one answer; returns the (expr, error) pairs that failed.
  auto absorb = [&](const std::string& text, bool repair_round) {
    std::vector<std::pair<std::string, std::string>> failures;
    nlohmann::json arr;
    try {
      arr = llm::extract_structured(text, llm::Shape::Array);
    } catch (const llm::StructuredOutputError& e) {
      out.warnings.push_back(std::string("criteria answer unusable: ") + e.what());
      return failures;
    }
    for (const auto& item : arr) {
      criteria::CriterionSource src;
      src.attr = out.set.attr;
      src.origin = origin;
      if (item.is_string()) {
        src.expr = item.get<std::string>();
      } else if (item.is_object() && item.contains("expr") && item["expr"].is_string()) {
        src.expr = item["expr"].get<std::string>();
        if (item.contains("name") && item["name"].is_string()) src.name = item["name"].get<std::string>();
        if (item.contains("description") && item["description"].is_string()) {
          src.description = item["description"].get<std::string>();
        }
      } else {
        out.warnings.push_back("criteria entry without an expression: " + item.dump());
        continue;
      }
      if (!repair_round) ++out.proposed;
      const bool duplicate = std::any_of(out.set.criteria.begin(), out.set.criteria.end(),
                                         [&](const criteria::Criterion& c) { return c.source.expr == src.expr; });
      if (duplicate) continue;
      if (src.name.empty()) src.name = out.set.attr + "_check_" + std::to_string(out.set.size() + 1);
      const std::string expr = src.expr;
      try {
        out.set.criteria.push_back(criteria::compile(std::move(src), schema));
        if (repair_round) ++out.repaired;
      } catch (const criteria::ParseError& e) {
        failures.emplace_back(expr, e.what());
      }
    }
    return failures;
  };

  const auto first = gateway_.complete(request(stage, prompt));
  const auto failures = absorb(first.text, false);
  if (!failures.empty()) {
    const auto repair = gateway_.complete(request(stage, prompts::criteria_repair(ds_, attr, failures)));
    for (const auto& [expr, error] : absorb(repair.text, true)) {
      out.warnings.push_back("discarded criterion `" + expr + "`: " + error);
    }
  }
  if (out.set.size() > cfg_.max_criteria) {
    out.warnings.push_back("kept the first " + std::to_string(cfg_.max_criteria) + " of " +
                           std::to_string(out.set.size()) + " criteria");
    out.set.criteria.resize(cfg_.max_criteria);
  }
  for (const auto& w : out.warnings) spdlog::warn("{}: {}", out.set.attr, w);
  return out;
}

std::optional<std::vector<LlmLabel>> parse_labels(std::string_view text, std::size_t attr,
                                                  std::span<const std::size_t> rows) {
  nlohmann::json arr;
  try {
    arr = llm::extract_structured(text, llm::Shape::Array);
  } catch (const llm::StructuredOutputError&) {
    return std::nullopt;
  }
  std::map<std::size_t, LlmLabel> by_row;
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("row") || !item.contains("label")) return std::nullopt;
    const auto row = row_of(item["row"]);
    const auto err = error_of(item["label"]);
    if (!row || !err) return std::nullopt;
    if (std::find(rows.begin(), rows.end(), *row) == rows.end()) return std::nullopt;
    LlmLabel l{*row, attr, *err, {}};
    if (item.contains("reason") && item["reason"].is_string()) l.reason = item["reason"].get<std::string>();
    if (!by_row.emplace(*row, std::move(l)).second) return std::nullopt;
  }
  if (by_row.size() != rows.size()) return std::nullopt;
  std::vector<LlmLabel> out;
  out.reserve(rows.size());
  for (const auto r : rows) out.push_back(by_row.at(r));
  return out;
}

LabelOutcome Annotator::label_samples(std::size_t attr, const Guideline& guideline, std::span<const std::size_t> rows,
                                      std::span<const std::size_t> correlates) {
  LabelOutcome out;
  const auto batches = split_batches(rows, cfg_.batch_size);
  out.batches = batches.size();
  std::vector<llm::PromptRequest> reqs;
  for (const auto& b : batches) {
    reqs.push_back(request(llm::Stage::Labeling, prompts::labeling(ds_, attr, guideline.text, b, correlates)));
  }
  const auto first = gateway_.complete_all(reqs);

  std::vector<std::optional<std::vector<LlmLabel>>> parsed(batches.size());
  std::vector<std::size_t> failed;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    parsed[b] = parse_labels(first[b].text, attr, batches[b]);
    if (!parsed[b]) failed.push_back(b);
  }
  if (!failed.empty()) {
    std::vector<llm::PromptRequest> retries;
    for (const auto b : failed) {
      auto req = reqs[b];
      req.user += prompts::retry_suffix("it did not label every row exactly once");
      retries.push_back(std::move(req));
    }
    const auto second = gateway_.complete_all(retries);
    for (std::size_t k = 0; k < failed.size(); ++k) {
      parsed[failed[k]] = parse_labels(second[k].text, attr, batches[failed[k]]);
    }
    out.retried_batches = failed.size();
  }
  for (std::size_t b = 0; b < batches.size(); ++b) {
    if (parsed[b]) {
      out.labels.insert(out.labels.end(), parsed[b]->begin(), parsed[b]->end());
    } else {
      spdlog::warn("{}: labeling batch {} failed after retry, {} rows unlabeled", ds_.attribute(attr), b,
                   batches[b].size());
      out.unlabeled.insert(out.unlabeled.end(), batches[b].begin(), batches[b].end());
    }
  }
  return out;
}

std::size_t naive_labeling_tokens(const Dataset& ds, std::span<const std::vector<std::size_t>> correlates,
                                  std::size_t batch_size) {
  if (correlates.size() != ds.num_attributes()) throw InvalidArgument("one correlate list per attribute expected");
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  std::vector<std::size_t> all(ds.num_rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const std::size_t system = llm::estimate_tokens(prompts::system_message());
  std::size_t total = 0;
  for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
    for (const auto& batch : split_batches(all, batch_size)) {
      auto answer = nlohmann::ordered_json::array();
      for (const auto i : batch) answer.push_back({{"row", i}, {"label", "right"}});
      total += system + llm::estimate_tokens(prompts::labeling(ds, j, "", batch, correlates[j])) +
               llm::estimate_tokens(answer.dump());
    }
  }
  return total;
}

nlohmann::ordered_json to_json(const LlmLabel& l, const Dataset& ds) {
  nlohmann::ordered_json j;
  j["attr"] = ds.attribute(l.attr);
  j["row"] = l.row;
  j["label"] = l.error ? "error" : "right";
  j["reason"] = l.reason;
  return j;
}

LlmLabel label_from_json(const nlohmann::json& j, const Dataset& ds) {
  LlmLabel l;
  l.attr = ds.attribute_index(j.at("attr").get<std::string>());
  l.row = j.at("row").get<std::size_t>();
  if (l.row >= ds.num_rows()) throw InvalidArgument("label row out of range");
  const auto label = j.at("label").get<std::string>();
  if (label != "error" && label != "right") throw InvalidArgument("unknown label " + label);
  l.error = label == "error";
  l.reason = j.value("reason", std::string{});
  return l;
}

}  // namespace zeroed::annotator

#include "zeroed/training/training.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include <spdlog/spdlog.h>

#include "zeroed/annotator/prompts.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/core/files.hpp"
#include "zeroed/core/inject.hpp"
#include "zeroed/core/rng.hpp"
#include "zeroed/features/pattern.hpp"
#include "zeroed/llm/structured.hpp"

namespace zeroed::training {

namespace {

constexpr std::size_t kContrastLimit = 20;
constexpr std::size_t kMaxVariantsPerValue = 3;
constexpr double kBandLow = 0.8;
constexpr double kBandHigh = 1.25;

// Rows of `labels` with the given class, skipping repeated values.
std::vector<std::size_t> distinct_value_rows(const Dataset& ds, std::size_t attr, std::span<const std::size_t> rows,
                                             std::size_t limit) {
  std::vector<std::size_t> out;
  std::set<std::string_view> seen;
  for (const auto i : rows) {
    if (out.size() == limit) break;
    if (seen.insert(ds.cell(i, attr)).second) out.push_back(i);
  }
  return out;
}

// Fallback injectors in rotation; nullopt when one does not apply.
std::optional<std::string> fallback_variant(std::size_t which, const std::string& value,
                                            const std::unordered_set<std::string>& patterns, Rng& rng) {
  switch (which % 4) {
    case 0:
      if (value.empty()) return std::nullopt;
      return corrupt::typo(value, rng);
    case 1:
      if (value.empty()) return std::nullopt;
      return std::string{};
    case 2: return corrupt::pattern_mangle(value, patterns, rng);
    default: return corrupt::scale_numeric(value, rng);
  }
}

std::vector<AugmentedError> llm_variants(annotator::Annotator& ann, const Dataset& ds, std::size_t attr,
                                         std::span<const std::size_t> sources, std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> batches;
  std::vector<llm::PromptRequest> reqs;
  for (std::size_t b = 0; b < sources.size(); b += batch_size) {
    const auto n = std::min(batch_size, sources.size() - b);
    batches.emplace_back(sources.begin() + static_cast<std::ptrdiff_t>(b),
                         sources.begin() + static_cast<std::ptrdiff_t>(b + n));
    reqs.push_back(ann.request(llm::Stage::Augment, annotator::prompts::augment(ds, attr, batches.back())));
  }
  std::vector<llm::CompletionResponse> resps;
  try {
    resps = ann.complete_all(reqs);
  } catch (const llm::LlmError& e) {
    spdlog::warn("{}: augmentation call failed, using fallbacks: {}", ds.attribute(attr), e.what());
    return {};
  }
  std::vector<AugmentedError> out;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    nlohmann::json arr;
    try {
      arr = llm::extract_structured(resps[b].text, llm::Shape::Array);
    } catch (const llm::StructuredOutputError& e) {
      spdlog::warn("{}: augmentation batch {} unusable: {}", ds.attribute(attr), b, e.what());
      continue;
    }
    // First answer per row wins; variants are kept in answer order.
    std::map<std::size_t, std::vector<std::string>> by_row;
    for (const auto& item : arr) {
      if (!item.is_object() || !item.contains("row") || !item.contains("variants")) continue;
      if (!item["row"].is_number_unsigned() || !item["variants"].is_array()) continue;
      const auto row = item["row"].get<std::size_t>();
      if (std::find(batches[b].begin(), batches[b].end(), row) == batches[b].end() || by_row.count(row)) continue;
      auto& kept = by_row[row];
      for (const auto& v : item["variants"]) {
        if (!v.is_string()) continue;
        auto text = v.get<std::string>();
        if (text == ds.cell(row, attr) || std::find(kept.begin(), kept.end(), text) != kept.end()) continue;
        kept.push_back(std::move(text));
        if (kept.size() == kMaxVariantsPerValue) break;
      }
    }
    for (const auto row : batches[b]) {
      const auto it = by_row.find(row);
      if (it == by_row.end()) continue;
      for (auto& v : it->second) out.push_back({attr, row, ds.cell(row, attr), std::move(v), Generator::Llm});
    }
  }
  return out;
}

}  // namespace

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Llm: return "llm";
    case Provenance::Propagated: return "propagated";
    case Provenance::Synthetic: return "synthetic";
  }
  return "?";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "llm") return Provenance::Llm;
  if (s == "propagated") return Provenance::Propagated;
  if (s == "synthetic") return Provenance::Synthetic;
  throw InvalidArgument("unknown provenance " + std::string(s));
}

const char* to_string(Generator g) noexcept { return g == Generator::Llm ? "llm" : "fallback"; }

std::vector<std::size_t> PropagatedLabels::rows_with(bool error) const {
  std::vector<std::size_t> out;
  for (const auto& c : cells) {
    if (c.error == error) out.push_back(c.row);
  }
  return out;
}

PropagatedLabels propagate_labels(const ClusterModel& model, std::span<const annotator::LlmLabel> labels,
                                  std::size_t attr) {
  const std::size_t n = model.assignments.size();
  std::vector<const annotator::LlmLabel*> by_cluster(model.s, nullptr);
  for (const auto& l : labels) {
    if (l.attr != attr) continue;
    if (l.row >= n) throw InvalidArgument("labeled row " + std::to_string(l.row) + " is not in any cluster");
    auto& slot = by_cluster[model.assignments[l.row]];
    if (slot != nullptr) throw InvalidArgument("two labeled samples in one cluster");
    slot = &l;
  }
  PropagatedLabels out;
  out.attr = attr;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* l = by_cluster[model.assignments[i]];
    if (l == nullptr) continue;
    out.cells.push_back({i, l->error, i == l->row ? Provenance::Llm : Provenance::Propagated});
  }
  return out;
}

RefineOutcome refine_criteria(annotator::Annotator& ann, const Dataset& ds, std::size_t attr,
                              const PropagatedLabels& labels, std::span<const std::size_t> correlates,
                              const criteria::CriterionSet& base) {
  RefineOutcome out{base, false, {}};
  const auto right = distinct_value_rows(ds, attr, labels.rows_with(false), kContrastLimit);
  const auto error = distinct_value_rows(ds, attr, labels.rows_with(true), kContrastLimit);
  if (error.empty() || right.empty()) return out;
  const auto prompt =
      annotator::prompts::contrastive(ds, attr, right, error, correlates, ann.config().max_criteria);
  try {
    auto got = ann.request_criteria(attr, prompt, llm::Stage::Refine, criteria::Origin::Refined);
    out.warnings = std::move(got.warnings);
    if (got.set.empty()) {
      out.warnings.push_back("refinement produced no usable criteria, keeping the initial set");
      spdlog::warn("{}: {}", ds.attribute(attr), out.warnings.back());
      return out;
    }
    out.set = std::move(got.set);
    out.refined = true;
  } catch (const llm::LlmError& e) {
    out.warnings.push_back(std::string("refinement call failed, keeping the initial set: ") + e.what());
    spdlog::warn("{}: {}", ds.attribute(attr), out.warnings.back());
  }
  return out;
}

criteria::CriterionSet verify_criteria(const criteria::CriterionSet& set, const Dataset& ds, std::size_t attr,
                                       std::span<const std::size_t> right_rows,
                                       std::vector<criteria::VerificationStats>* stats) {
  criteria::CriterionSet kept;
  kept.attr = set.attr;
  if (stats) stats->clear();
  for (const auto& c : set.criteria) {
    const auto st = criteria::criterion_accuracy(c, ds, attr, right_rows);
    if (!(st.accuracy_on_right < 0.5)) kept.criteria.push_back(c);
    if (stats) stats->push_back(st);
  }
  return kept;
}

std::vector<std::size_t> verify_right_labels(std::span<const std::size_t> right_rows,
                                             const criteria::CriterionSet& set, const Dataset& ds,
                                             std::size_t attr) {
  if (set.empty()) return {right_rows.begin(), right_rows.end()};
  std::vector<std::size_t> kept;
  for (const auto i : right_rows) {
    if (!(criteria::pass_rate(set, ds, i, attr) < 0.5)) kept.push_back(i);
  }
  return kept;
}

Verification mutual_verification(const criteria::CriterionSet& set, const Dataset& ds, std::size_t attr,
                                 std::span<const std::size_t> right_rows) {
  Verification v{set, {right_rows.begin(), right_rows.end()}, {}, 0};
  while (!v.right_rows.empty()) {
    ++v.rounds;
    auto kept = verify_criteria(v.set, ds, attr, v.right_rows, v.rounds == 1 ? &v.stats : nullptr);
    auto rows = verify_right_labels(v.right_rows, kept, ds, attr);
    const bool stable = kept.size() == v.set.size() && rows.size() == v.right_rows.size();
    v.set = std::move(kept);
    v.right_rows = std::move(rows);
    if (stable) break;
  }
  return v;
}

std::vector<AugmentedError> augment_errors(annotator::Annotator* ann, const Dataset& ds, std::size_t attr,
                                           std::span<const std::size_t> right_rows, std::size_t target,
                                           const AugmentConfig& cfg) {
  std::vector<AugmentedError> out;
  if (target == 0 || right_rows.empty()) return out;
  std::vector<std::size_t> order(right_rows.begin(), right_rows.end());
  Rng rng(hash_combine(cfg.seed, attr));
  rng.shuffle(std::span<std::size_t>(order));

  if (ann != nullptr && cfg.llm_values > 0) {
    const auto sources = distinct_value_rows(ds, attr, order, cfg.llm_values);
    out = llm_variants(*ann, ds, attr, sources, std::max<std::size_t>(1, cfg.batch_size));
    if (out.size() > target) out.resize(target);
  }

  std::unordered_set<std::string> patterns;
  for (const auto i : right_rows) patterns.insert(generalize_pattern(ds.cell(i, attr), PatternLevel::L3));
  // Every non-empty value admits a typo, so at most two misses per success
  // when values are non-empty; the bound only guards all-empty right sets.
  const std::size_t max_attempts = 8 * target + 8 * order.size();
  for (std::size_t attempt = 0; out.size() < target && attempt < max_attempts; ++attempt) {
    const std::size_t row = order[attempt % order.size()];
    const std::string& value = ds.cell(row, attr);
    // The injector shifts by one on every pass over the rows, so each row
    // sees every injector even when the row count is a multiple of four.
    auto v = fallback_variant(attempt + attempt / order.size(), value, patterns, rng);
    if (!v || *v == value) continue;
    out.push_back({attr, row, value, std::move(*v), Generator::Fallback});
  }
  if (out.size() < target) {
    spdlog::warn("{}: augmentation produced {} of {} errors", ds.attribute(attr), out.size(), target);
  }
  return out;
}

FeatureMatrix featurize_augmented(const FrequencyIndex& index, const EmbeddingTable& table,
                                  const criteria::CriterionSet& set, const BaseLayout& layout,
                                  std::span<const FeatureMatrix> bases, std::span<const std::size_t> correlates,
                                  std::span<const AugmentedError> augmented) {
  FeatureMatrix out(0, layout.width() * (1 + correlates.size()));
  out.data().reserve(augmented.size() * out.cols());
  for (const auto& a : augmented) {
    const auto base = variant_base_row(index, table, set, layout, a.row, a.attr, a.variant);
    out.append_row(variant_unified_row(base, bases, a.row, correlates));
  }
  return out;
}

std::size_t TrainingSet::positives() const { return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1)); }

std::size_t TrainingSet::count(Provenance p) const {
  return static_cast<std::size_t>(std::count(provenance.begin(), provenance.end(), p));
}

TrainingSet assemble_training_set(std::size_t attr, const FeatureMatrix& unified, const PropagatedLabels& labels,
                                  std::span<const std::size_t> verified_right,
                                  std::span<const AugmentedError> augmented, const FeatureMatrix& synthetic_features,
                                  std::uint64_t seed, AssemblyReport* report) {
  if (synthetic_features.rows() != augmented.size()) throw ShapeError("one feature row per augmented error expected");
  if (!augmented.empty() && synthetic_features.cols() != unified.cols()) {
    throw ShapeError("synthetic features differ in width from the unified features");
  }
  struct Example {
    std::size_t row;
    std::uint8_t y;
    Provenance prov;
    std::size_t synthetic_index;  // into augmented, or npos
  };
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::map<std::size_t, Provenance> prov_of;
  for (const auto& c : labels.cells) prov_of.emplace(c.row, c.provenance);

  std::vector<Example> ex;
  for (const auto i : verified_right) {
    const auto it = prov_of.find(i);
    ex.push_back({i, 0, it == prov_of.end() ? Provenance::Propagated : it->second, npos});
  }
  std::size_t errors = 0;
  for (const auto& c : labels.cells) {
    if (!c.error) continue;
    ex.push_back({c.row, 1, c.provenance, npos});
    ++errors;
  }
  for (std::size_t k = 0; k < augmented.size(); ++k) ex.push_back({augmented[k].row, 1, Provenance::Synthetic, k});

  Rng rng(hash_combine(seed, attr));
  rng.shuffle(std::span<Example>(ex));

  TrainingSet ts;
  ts.attr = attr;
  ts.x = FeatureMatrix(ex.size(), unified.cols());
  for (std::size_t r = 0; r < ex.size(); ++r) {
    const auto src = ex[r].synthetic_index == npos ? unified.row(ex[r].row) : synthetic_features.row(ex[r].synthetic_index);
    std::copy(src.begin(), src.end(), ts.x.row(r).begin());
    ts.y.push_back(ex[r].y);
    ts.provenance.push_back(ex[r].prov);
    ts.rows.push_back(ex[r].row);
    ts.variants.push_back(ex[r].synthetic_index == npos ? std::string{} : augmented[ex[r].synthetic_index].variant);
  }

  AssemblyReport rep;
  rep.right = verified_right.size();
  rep.errors = errors;
  rep.synthetic = augmented.size();
  const std::size_t positives = errors + augmented.size();
  rep.ratio = rep.right == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(rep.right);
  rep.balanced = rep.ratio >= kBandLow && rep.ratio <= kBandHigh;
  if (rep.right == 0 || positives == 0) {
    rep.excluded = true;
    rep.diagnostics = rep.right == 0 ? "no right-labeled cells remain" : "no error examples remain";
  } else if (!rep.balanced) {
    rep.diagnostics = "class ratio " + std::to_string(rep.ratio) + " outside [0.8, 1.25]";
  }
  if (report) *report = rep;
  return ts;
}

void save_training_set(const std::filesystem::path& base, const TrainingSet& ts) {
  nlohmann::ordered_json meta;
  meta["attr"] = ts.attr;
  save_matrix(base, ts.x, meta.dump());
  std::string lines;
  for (std::size_t r = 0; r < ts.size(); ++r) {
    nlohmann::ordered_json j;
    j["row"] = ts.rows[r];
    j["label"] = ts.y[r];
    j["provenance"] = to_string(ts.provenance[r]);
    if (ts.provenance[r] == Provenance::Synthetic) j["variant"] = ts.variants[r];
    lines += j.dump() + "\n";
  }
  write_file_atomic(with_suffix(base, ".labels.jsonl"), lines);
}

TrainingSet load_training_set(const std::filesystem::path& base) {
  std::string meta;
  TrainingSet ts;
  ts.x = load_matrix(base, &meta);
  ts.attr = nlohmann::json::parse(meta).at("attr").get<std::size_t>();
  const std::string text = read_file(with_suffix(base, ".labels.jsonl"));
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) {
      const auto j = nlohmann::json::parse(text.substr(start, end - start));
      ts.rows.push_back(j.at("row").get<std::size_t>());
      ts.y.push_back(j.at("label").get<std::uint8_t>());
      ts.provenance.push_back(provenance_from_string(j.at("provenance").get<std::string>()));
      ts.variants.push_back(j.value("variant", std::string{}));
    }
    start = end + 1;
  }
  if (ts.y.size() != ts.x.rows()) throw IoError("training labels do not match features for " + base.string());
  return ts;
}

}  // namespace zeroed::training

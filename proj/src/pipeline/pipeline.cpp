#include "zeroed/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "zeroed/annotator/annotator.hpp"
#include "zeroed/core/csv.hpp"
#include "zeroed/core/files.hpp"
#include "zeroed/core/hash.hpp"
#include "zeroed/core/rng.hpp"
#include "zeroed/detector/mlp.hpp"
#include "zeroed/features/embedding.hpp"
#include "zeroed/features/frequency.hpp"
#include "zeroed/features/nmi.hpp"
#include "zeroed/features/unified.hpp"
#include "zeroed/llm/gateway.hpp"
#include "zeroed/sampler/kmeans.hpp"
#include "zeroed/training/training.hpp"

namespace zeroed::pipeline {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr std::uint64_t kAugmentSalt = 0xa5a5;
constexpr std::uint64_t kTrainSalt = 0x7a1e;
constexpr std::uint64_t kShuffleSalt = 0x5f1f;

std::string attr_file(std::size_t j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "a%02zu", j);
  return buf;
}

Json read_json(const fs::path& p) { return Json::parse(read_file(p)); }

std::vector<Json> read_jsonl(const fs::path& p) {
  std::vector<Json> out;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(Json::parse(line));
  }
  return out;
}

bool is_llm_stage(StageId s) {
  return s == StageId::Criteria || s == StageId::Probes || s == StageId::Guidelines || s == StageId::Labeling ||
         s == StageId::TrainingData;
}

std::vector<llm::LedgerEntry> load_ledger_file(const fs::path& p) {
  std::vector<llm::LedgerEntry> out;
  for (const auto& e : read_json(p)) {
    const auto stage = llm::stage_from_string(e.at("stage").get<std::string>());
    if (!stage) throw IoError("unknown LLM stage in " + p.string());
    out.push_back({*stage, e.at("prompt_tokens").get<std::size_t>(), e.at("completion_tokens").get<std::size_t>(),
                   true});
  }
  return out;
}

std::vector<llm::LedgerEntry> load_all_ledgers(const fs::path& run_dir) {
  std::vector<llm::LedgerEntry> out;
  for (const auto s : kAllStageIds) {
    const auto p = run_dir / "ledger" / (std::string(to_string(s)) + ".json");
    if (!is_llm_stage(s) || !fs::exists(p)) continue;
    const auto part = load_ledger_file(p);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Json eval_json(const EvalReport& r) { return Json::parse(to_json(r)); }

class Run {
 public:
  explicit Run(const RunConfig& cfg) : cfg_(cfg), out_(cfg.out) {}

  RunResult execute();

 private:
  // Stage bodies. Each compute_* records the files it wrote via `track`.
  void compute(StageId s);
  void load(StageId s);

  void compute_features();
  void compute_correlations();
  void compute_criteria();
  void compute_criteria_features();
  void compute_unified();
  void compute_clustering();
  void compute_sampling();
  void compute_probes();
  void compute_guidelines();
  void compute_labeling();
  void compute_training_data();
  void compute_training();
  void compute_prediction();
  void compute_evaluation();

  void load_correlations();

  void prepare();
  std::unique_ptr<llm::Gateway> gateway(StageId s);
  void persist_ledger(StageId s, const llm::Gateway& gw);
  annotator::AnnotatorConfig annotator_config() const;

  void track(const fs::path& p) { written_.push_back(p); }
  void save_json(const fs::path& rel, const Json& j) {
    write_file_atomic(out_ / rel, j.dump(2) + "\n");
    track(rel);
  }
  void save_matrix_tracked(const fs::path& rel, const FeatureMatrix& m, const std::string& meta = "{}") {
    save_matrix(out_ / rel, m, meta);
    track(with_suffix(rel, ".f32"));
    track(with_suffix(rel, ".json"));
  }

  bool stage_complete(StageId s) const;
  void record_stage(StageId s);
  void write_manifest() const;

  std::size_t n() const { return ds_.num_rows(); }
  std::size_t m() const { return ds_.num_attributes(); }

  const RunConfig& cfg_;
  fs::path out_;
  Json manifest_;
  std::string config_digest_;
  std::vector<fs::path> written_;
  std::map<std::string, double> timings_;
  std::map<std::string, llm::UsageReport> charged_;
  std::size_t provider_calls_ = 0;

  Dataset ds_;
  std::optional<Dataset> truth_;
  std::unique_ptr<FrequencyIndex> index_;
  EmbeddingTable table_;
  BaseLayout layout_;
  std::shared_ptr<llm::Provider> provider_;

  std::vector<FeatureMatrix> intrinsic_;
  CorrelationMap cm_;
  std::vector<std::vector<std::size_t>> correlates_;
  std::vector<criteria::CriterionSet> initial_;
  std::vector<FeatureMatrix> criteria_bits_;
  std::vector<FeatureMatrix> unified_;
  std::vector<ClusterModel> clusters_;
  std::vector<std::vector<std::size_t>> samples_;
  std::vector<std::vector<annotator::ProbeResult>> probe_results_;
  std::vector<annotator::Guideline> guidelines_;
  std::vector<annotator::LlmLabel> labels_;
  std::vector<std::vector<std::size_t>> unlabeled_;
  std::vector<criteria::CriterionSet> verified_;
  std::vector<training::PropagatedLabels> propagated_;
  std::vector<FeatureMatrix> final_;
  std::vector<training::TrainingSet> training_;
  std::vector<training::AssemblyReport> assembly_;
  std::vector<std::optional<detector::MlpModel>> models_;
  std::optional<CellMask> mask_;
  std::optional<EvalReport> eval_;
};

// ---------------------------------------------------------------------------
// Setup, manifest and ledgers

void Run::prepare() {
  ds_ = load_csv(cfg_.input);
  if (!cfg_.truth.empty()) {
    truth_ = load_csv(cfg_.truth);
    if (!truth_->same_shape(ds_)) throw ConfigError("ground truth does not match the input shape");
  }
  if (cfg_.corr_k + 1 > m()) {
    throw ConfigError("corr_k must be at most " + std::to_string(m() - 1) + " for " + std::to_string(m()) +
                      " attributes");
  }
  index_ = std::make_unique<FrequencyIndex>(ds_);
  table_ = cfg_.embeddings.empty() ? EmbeddingTable::hashing(cfg_.semantic_dim, cfg_.seed)
                                   : EmbeddingTable::load_vec(cfg_.embeddings);
  layout_ = BaseLayout{m(), table_.dim(), cfg_.max_criteria};

  config_digest_ = sha256_hex(to_json(cfg_).dump());
  const auto manifest_path = out_ / "manifest.json";
  // Unselected stages load from an earlier run even without resume.
  if (fs::exists(manifest_path)) {
    manifest_ = read_json(manifest_path);
    if (manifest_.value("config_sha256", std::string{}) != config_digest_ ||
        manifest_.value("layout_version", 0) != kLayoutVersion) {
      if (cfg_.resume) spdlog::warn("configuration changed since the previous run; recomputing every stage");
      manifest_ = Json::object();
    }
  }
  manifest_["layout_version"] = kLayoutVersion;
  manifest_["config_sha256"] = config_digest_;
  if (!manifest_.contains("stages")) manifest_["stages"] = Json::object();
  write_file_atomic(out_ / "config.json", to_json(cfg_).dump(2) + "\n");
}

bool Run::stage_complete(StageId s) const {
  const auto& stages = manifest_["stages"];
  if (!stages.contains(to_string(s))) return false;
  for (const auto& [file, digest] : stages[to_string(s)].items()) {
    const auto p = out_ / file;
    if (!fs::exists(p) || sha256_hex(read_file(p)) != digest.get<std::string>()) return false;
  }
  return true;
}

void Run::record_stage(StageId s) {
  Json files = Json::object();
  for (const auto& rel : written_) files[rel.generic_string()] = sha256_hex(read_file(out_ / rel));
  written_.clear();
  auto& stages = manifest_["stages"];
  stages[to_string(s)] = std::move(files);
  // Later stages were built from the previous version of this one.
  bool later = false;
  for (const auto id : kAllStageIds) {
    if (later) stages.erase(to_string(id));
    if (id == s) later = true;
  }
  write_manifest();
}

void Run::write_manifest() const { write_file_atomic(out_ / "manifest.json", manifest_.dump(2) + "\n"); }

std::unique_ptr<llm::Gateway> Run::gateway(StageId s) {
  if (!provider_) {
    provider_ = llm::make_provider(cfg_.provider, &ds_, truth_ ? &*truth_ : nullptr);
  }
  llm::GatewayOptions opt;
  opt.max_in_flight = cfg_.max_in_flight;
  opt.cache_dir = cfg_.effective_cache_dir();
  opt.audit_dir = out_ / "audit" / to_string(s);
  if (fs::exists(opt.audit_dir)) fs::remove_all(opt.audit_dir);
  return std::make_unique<llm::Gateway>(provider_, opt);
}

void Run::persist_ledger(StageId s, const llm::Gateway& gw) {
  auto entries = gw.ledger().entries();
  charged_[to_string(s)] = llm::usage_report(entries);
  provider_calls_ += gw.provider_calls();
  // Submission order is not observable under concurrency; sort for stable bytes.
  std::sort(entries.begin(), entries.end(), [](const llm::LedgerEntry& a, const llm::LedgerEntry& b) {
    return std::tie(a.stage, a.prompt_tokens, a.completion_tokens) <
           std::tie(b.stage, b.prompt_tokens, b.completion_tokens);
  });
  Json arr = Json::array();
  for (const auto& e : entries) {
    arr.push_back({{"stage", llm::to_string(e.stage)},
                   {"prompt_tokens", e.prompt_tokens},
                   {"completion_tokens", e.completion_tokens}});
  }
  save_json(fs::path("ledger") / (std::string(to_string(s)) + ".json"), arr);
}

annotator::AnnotatorConfig Run::annotator_config() const {
  annotator::AnnotatorConfig a;
  a.model = cfg_.model;
  a.batch_size = cfg_.batch_size;
  a.max_criteria = cfg_.max_criteria;
  a.seed = cfg_.seed;
  return a;
}

// ---------------------------------------------------------------------------
// Stages

void Run::compute_features() {
  intrinsic_.resize(m());
  for (std::size_t j = 0; j < m(); ++j) {
    intrinsic_[j] = intrinsic_features(*index_, table_, j, cfg_.exec);
    save_matrix_tracked(fs::path("features/intrinsic") / attr_file(j), intrinsic_[j]);
  }
}

void Run::compute_correlations() {
  cm_ = build_correlation_map(*index_, cfg_.exec);
  correlates_.assign(m(), {});
  Json corr = Json::object();
  for (std::size_t j = 0; j < m(); ++j) {
    correlates_[j] = correlated_attributes(cm_, j, cfg_.corr_k);
    Json names = Json::array();
    for (const auto q : correlates_[j]) names.push_back(ds_.attribute(q));
    corr[ds_.attribute(j)] = names;
  }
  Json j;
  j["attributes"] = ds_.attributes();
  j["nmi"] = cm_.matrix;
  j["correlates"] = corr;
  save_json("correlations.json", j);
}

void Run::load_correlations() {
  const auto j = read_json(out_ / "correlations.json");
  cm_ = correlation_map_from_matrix(m(), j.at("nmi").get<std::vector<double>>());
  correlates_.assign(m(), {});
  for (std::size_t a = 0; a < m(); ++a) correlates_[a] = correlated_attributes(cm_, a, cfg_.corr_k);
}

void Run::compute_criteria() {
  auto gw = gateway(StageId::Criteria);
  annotator::Annotator ann(ds_, *gw, annotator_config());
  initial_.assign(m(), {});
  for (std::size_t j = 0; j < m(); ++j) initial_[j] = ann.propose_criteria(j, ann.sample_rows(j)).set;
  save_json("criteria/initial.json", criteria::to_json(std::span<const criteria::CriterionSet>(initial_)));
  persist_ledger(StageId::Criteria, *gw);
}

void Run::compute_criteria_features() {
  criteria_bits_.resize(m());
  for (std::size_t j = 0; j < m(); ++j) {
    criteria_bits_[j] = criteria_features(initial_[j], ds_, j, cfg_.exec);
    save_matrix_tracked(fs::path("features/criteria") / attr_file(j), criteria_bits_[j]);
  }
}

void Run::compute_unified() {
  std::vector<FeatureMatrix> bases(m());
  for (std::size_t j = 0; j < m(); ++j) bases[j] = compose_base(intrinsic_[j], criteria_bits_[j], layout_);
  unified_.resize(m());
  for (std::size_t j = 0; j < m(); ++j) {
    unified_[j] = assemble_unified(bases, j, correlates_[j]);
    save_matrix_tracked(fs::path("features/unified") / attr_file(j), unified_[j]);
  }
}

void Run::compute_clustering() {
  const std::size_t s = cfg_.clusters > 0 ? std::min(cfg_.clusters, n()) : cluster_budget(n(), cfg_.label_rate);
  clusters_.resize(m());
  for (std::size_t j = 0; j < m(); ++j) {
    clusters_[j] = cluster_attribute(unified_[j], s, hash_combine(cfg_.seed, j), cfg_.exec);
    const auto base = fs::path("clusters") / attr_file(j);
    save_cluster_model(out_ / base, clusters_[j]);
    track(with_suffix(base, ".u32"));
    track(with_suffix(base, ".json"));
  }
}

void Run::compute_sampling() {
  samples_.resize(m());
  Json j = Json::object();
  for (std::size_t a = 0; a < m(); ++a) {
    samples_[a] = select_centroids(clusters_[a], unified_[a]);
    j[ds_.attribute(a)] = samples_[a];
  }
  save_json("samples.json", j);
}

void Run::compute_probes() {
  auto gw = gateway(StageId::Probes);
  annotator::Annotator ann(ds_, *gw, annotator_config());
  probe_results_.assign(m(), {});
  Json j = Json::object();
  for (std::size_t a = 0; a < m(); ++a) {
    Json list = Json::array();
    for (const auto& p : ann.propose_probes(a, ann.sample_rows(a))) {
      probe_results_[a].push_back(annotator::run_probe(ds_, p));
      list.push_back(annotator::to_json(p, ds_));
    }
    j[ds_.attribute(a)] = list;
  }
  save_json("probes.json", j);
  persist_ledger(StageId::Probes, *gw);
}

void Run::compute_guidelines() {
  auto gw = gateway(StageId::Guidelines);
  annotator::Annotator ann(ds_, *gw, annotator_config());
  guidelines_.assign(m(), {});
  Json arr = Json::array();
  for (std::size_t a = 0; a < m(); ++a) {
    guidelines_[a] = ann.build_guideline(a, probe_results_[a], samples_[a], correlates_[a]);
    if (!guidelines_[a].ok) spdlog::warn("{}", guidelines_[a].diagnostics);
    arr.push_back({{"attr", ds_.attribute(a)},
                   {"ok", guidelines_[a].ok},
                   {"text", guidelines_[a].text},
                   {"diagnostics", guidelines_[a].diagnostics}});
  }
  save_json("guidelines.json", arr);
  persist_ledger(StageId::Guidelines, *gw);
}

void Run::compute_labeling() {
  auto gw = gateway(StageId::Labeling);
  annotator::Annotator ann(ds_, *gw, annotator_config());
  labels_.clear();
  unlabeled_.assign(m(), {});
  for (std::size_t a = 0; a < m(); ++a) {
    if (!guidelines_[a].ok) {
      // Aborted attribute: its samples never reach the LLM.
      unlabeled_[a] = samples_[a];
      continue;
    }
    auto got = ann.label_samples(a, guidelines_[a], samples_[a], correlates_[a]);
    labels_.insert(labels_.end(), got.labels.begin(), got.labels.end());
    unlabeled_[a] = std::move(got.unlabeled);
  }
  std::string lines;
  for (const auto& l : labels_) lines += annotator::to_json(l, ds_).dump() + "\n";
  write_file_atomic(out_ / "labels/llm.jsonl", lines);
  track("labels/llm.jsonl");
  Json un = Json::object();
  for (std::size_t a = 0; a < m(); ++a) un[ds_.attribute(a)] = unlabeled_[a];
  save_json("labels/unlabeled.json", un);
  persist_ledger(StageId::Labeling, *gw);
}

void Run::compute_training_data() {
  auto gw = gateway(StageId::TrainingData);
  annotator::Annotator ann(ds_, *gw, annotator_config());
  propagated_.assign(m(), {});
  verified_.assign(m(), {});
  std::vector<criteria::CriterionSet> refined(m());
  std::vector<training::Verification> ver(m());
  Json ver_json = Json::array();
  std::string propagated_lines;

  for (std::size_t j = 0; j < m(); ++j) {
    std::vector<annotator::LlmLabel> mine;
    for (const auto& l : labels_) {
      if (l.attr == j) mine.push_back(l);
    }
    propagated_[j] = training::propagate_labels(clusters_[j], mine, j);
    for (const auto& c : propagated_[j].cells) {
      Json line;
      line["attr"] = ds_.attribute(j);
      line["row"] = c.row;
      line["label"] = c.error ? "error" : "right";
      line["provenance"] = training::to_string(c.provenance);
      propagated_lines += line.dump() + "\n";
    }
    auto r = training::refine_criteria(ann, ds_, j, propagated_[j], correlates_[j], initial_[j]);
    refined[j] = r.set;
    const auto right = propagated_[j].rows_with(false);
    ver[j] = training::mutual_verification(refined[j], ds_, j, right);
    verified_[j] = ver[j].set;

    Json crit = Json::array();
    for (std::size_t k = 0; k < refined[j].size(); ++k) {
      const auto& c = refined[j].criteria[k];
      const bool kept = std::any_of(verified_[j].criteria.begin(), verified_[j].criteria.end(),
                                    [&](const criteria::Criterion& v) { return v.source.expr == c.source.expr; });
      Json cj;
      cj["name"] = c.source.name;
      cj["expr"] = c.source.expr;
      if (k < ver[j].stats.size()) cj["accuracy_on_right"] = ver[j].stats[k].accuracy_on_right;
      cj["kept"] = kept;
      crit.push_back(cj);
    }
    // Postconditions on the final sets.
    double min_acc = 1.0;
    double min_pass = 1.0;
    if (!ver[j].right_rows.empty()) {
      for (const auto& c : verified_[j].criteria) {
        min_acc = std::min(min_acc, criteria::criterion_accuracy(c, ds_, j, ver[j].right_rows).accuracy_on_right);
      }
      if (!verified_[j].empty()) {
        for (const auto i : ver[j].right_rows) min_pass = std::min(min_pass, criteria::pass_rate(verified_[j], ds_, i, j));
      }
    }
    Json vj;
    vj["attr"] = ds_.attribute(j);
    vj["refined"] = r.refined;
    vj["rounds"] = ver[j].rounds;
    vj["right_before"] = right.size();
    vj["right_after"] = ver[j].right_rows.size();
    vj["criteria"] = crit;
    vj["min_accuracy"] = min_acc;
    vj["min_pass_rate"] = min_pass;
    vj["postconditions_hold"] = min_acc >= 0.5 && min_pass >= 0.5;
    vj["warnings"] = r.warnings;
    ver_json.push_back(vj);
  }
  save_json("criteria/refined.json", criteria::to_json(std::span<const criteria::CriterionSet>(refined)));
  save_json("criteria/verified.json", criteria::to_json(std::span<const criteria::CriterionSet>(verified_)));
  save_json("verification.json", ver_json);
  write_file_atomic(out_ / "labels/propagated.jsonl", propagated_lines);
  track("labels/propagated.jsonl");

  // Final features use the verified criteria.
  std::vector<FeatureMatrix> bases(m());
  for (std::size_t j = 0; j < m(); ++j) {
    bases[j] = compose_base(intrinsic_[j], criteria_features(verified_[j], ds_, j, cfg_.exec), layout_);
  }
  final_.resize(m());
  training_.assign(m(), {});
  assembly_.assign(m(), {});
  std::string aug_lines;
  Json report = Json::array();
  for (std::size_t j = 0; j < m(); ++j) {
    final_[j] = assemble_unified(bases, j, correlates_[j]);
    save_matrix_tracked(fs::path("features/final") / attr_file(j), final_[j]);

    const std::size_t errors = propagated_[j].rows_with(true).size();
    const std::size_t right = ver[j].right_rows.size();
    const std::size_t target = right > errors ? right - errors : 0;
    auto aug_cfg = cfg_.augment;
    aug_cfg.batch_size = cfg_.batch_size;
    aug_cfg.seed = hash_combine(cfg_.seed, kAugmentSalt);
    const auto aug = training::augment_errors(&ann, ds_, j, ver[j].right_rows, target, aug_cfg);
    for (const auto& a : aug) {
      Json line;
      line["attr"] = ds_.attribute(j);
      line["row"] = a.row;
      line["source"] = a.source;
      line["variant"] = a.variant;
      line["generator"] = training::to_string(a.generator);
      aug_lines += line.dump() + "\n";
    }
    const auto synth = training::featurize_augmented(*index_, table_, verified_[j], layout_, bases, correlates_[j], aug);
    training_[j] = training::assemble_training_set(j, final_[j], propagated_[j], ver[j].right_rows, aug, synth,
                                                   hash_combine(cfg_.seed, kShuffleSalt), &assembly_[j]);
    const bool met_target = aug.size() == target;
    const auto base = fs::path("training") / attr_file(j);
    training::save_training_set(out_ / base, training_[j]);
    track(with_suffix(base, ".f32"));
    track(with_suffix(base, ".json"));
    track(with_suffix(base, ".labels.jsonl"));
    const auto& rep = assembly_[j];
    if (rep.excluded) spdlog::warn("{}: excluded from training: {}", ds_.attribute(j), rep.diagnostics);
    else if (!rep.balanced) spdlog::warn("{}: {}", ds_.attribute(j), rep.diagnostics);
    Json rj;
    rj["attr"] = ds_.attribute(j);
    rj["right"] = rep.right;
    rj["errors"] = rep.errors;
    rj["synthetic"] = rep.synthetic;
    rj["synthetic_llm"] = std::count_if(aug.begin(), aug.end(),
                                        [](const auto& a) { return a.generator == training::Generator::Llm; });
    rj["augmentation_target"] = target;
    rj["augmentation_met_target"] = met_target;
    rj["ratio"] = rep.ratio;
    rj["balanced"] = rep.balanced;
    rj["excluded"] = rep.excluded;
    rj["diagnostics"] = rep.diagnostics;
    rj["rows"] = training_[j].size();
    report.push_back(rj);
  }
  write_file_atomic(out_ / "augment/errors.jsonl", aug_lines);
  track("augment/errors.jsonl");
  save_json("training/report.json", report);
  persist_ledger(StageId::TrainingData, *gw);
}

void Run::compute_training() {
  models_.assign(m(), std::nullopt);
  std::vector<detector::TrainReport> reports(m());
  std::vector<std::string> skipped(m());
  std::vector<std::exception_ptr> errors(m());
  const bool parallel = cfg_.exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(m()); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    try {
      const auto& ts = training_[j];
      const auto pos = ts.positives();
      if (assembly_[j].excluded || ts.size() < 10 || pos == 0 || pos == ts.size()) {
        skipped[j] = assembly_[j].excluded ? assembly_[j].diagnostics : "too few or single-class training rows";
        continue;
      }
      auto tc = cfg_.train;
      tc.seed = hash_combine(hash_combine(cfg_.seed, kTrainSalt), j);
      auto [model, rep] = detector::train_mlp(ts.x, ts.y, tc, ds_.attribute(j));
      models_[j] = std::move(model);
      reports[j] = std::move(rep);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Json report = Json::array();
  for (std::size_t j = 0; j < m(); ++j) {
    Json rj;
    rj["attr"] = ds_.attribute(j);
    rj["trained"] = models_[j].has_value();
    if (models_[j]) {
      const auto& r = reports[j];
      rj["epochs"] = r.epochs;
      rj["best_epoch"] = r.best_epoch;
      rj["initial_loss"] = r.initial_loss;
      rj["train_loss"] = r.train_loss;
      rj["validation_loss"] = r.validation_loss;
      rj["validation_accuracy"] = r.validation_accuracy;
      const auto base = fs::path("models") / attr_file(j);
      Json meta;
      meta["optimizer"] = detector::to_string(cfg_.train.optimizer);
      meta["epochs"] = r.epochs;
      meta["train_loss"] = r.train_loss;
      meta["validation_loss"] = r.validation_loss;
      detector::save_model(out_ / base, *models_[j], meta.dump());
      track(with_suffix(base, ".bin"));
      track(with_suffix(base, ".json"));
    } else {
      rj["reason"] = skipped[j];
    }
    report.push_back(rj);
  }
  save_json("models/report.json", report);
}

void Run::compute_prediction() {
  CellMask mask(n(), m());
  FeatureMatrix proba(n(), m());
  for (std::size_t j = 0; j < m(); ++j) {
    if (models_[j]) {
      const auto p = detector::predict_proba(*models_[j], final_[j], cfg_.exec);
      for (std::size_t i = 0; i < n(); ++i) {
        proba(i, j) = static_cast<float>(p[i]);
        mask.set(i, j, detector::verdict(p[i]));
      }
    } else {
      // No detector for this attribute: fall back to the propagated labels.
      for (const auto& c : propagated_[j].cells) {
        mask.set(c.row, j, c.error);
        proba(c.row, j) = c.error ? 1.0f : 0.0f;
      }
    }
  }
  save_mask_csv(out_ / "detection/mask.csv", mask, ds_.attributes());
  track("detection/mask.csv");
  save_matrix_tracked("detection/probabilities", proba);
  mask_ = std::move(mask);
}

void Run::compute_evaluation() {
  const auto truth_mask = diff_mask(ds_, *truth_);
  eval_ = evaluate_detection(*mask_, truth_mask);
  Json j;
  j["overall"] = eval_json(*eval_);
  Json per = Json::object();
  for (std::size_t a = 0; a < m(); ++a) per[ds_.attribute(a)] = eval_json(evaluate_column(*mask_, truth_mask, a));
  j["attributes"] = per;
  save_json("evaluation.json", j);
}

void Run::compute(StageId s) {
  switch (s) {
    case StageId::Features: return compute_features();
    case StageId::Correlations: return compute_correlations();
    case StageId::Criteria: return compute_criteria();
    case StageId::CriteriaFeatures: return compute_criteria_features();
    case StageId::Unified: return compute_unified();
    case StageId::Clustering: return compute_clustering();
    case StageId::Sampling: return compute_sampling();
    case StageId::Probes: return compute_probes();
    case StageId::Guidelines: return compute_guidelines();
    case StageId::Labeling: return compute_labeling();
    case StageId::TrainingData: return compute_training_data();
    case StageId::Training: return compute_training();
    case StageId::Prediction: return compute_prediction();
    case StageId::Evaluation: return compute_evaluation();
  }
}

void Run::load(StageId s) {
  auto per_attr = [&](const char* dir, std::vector<FeatureMatrix>& out) {
    out.resize(m());
    for (std::size_t j = 0; j < m(); ++j) out[j] = load_matrix(out_ / dir / attr_file(j));
  };
  switch (s) {
    case StageId::Features: return per_attr("features/intrinsic", intrinsic_);
    case StageId::Correlations: return load_correlations();
    case StageId::Criteria:
      initial_ = criteria::sets_from_json(read_json(out_ / "criteria/initial.json"), ds_.attributes());
      return;
    case StageId::CriteriaFeatures: return per_attr("features/criteria", criteria_bits_);
    case StageId::Unified: return per_attr("features/unified", unified_);
    case StageId::Clustering:
      clusters_.resize(m());
      for (std::size_t j = 0; j < m(); ++j) clusters_[j] = load_cluster_model(out_ / "clusters" / attr_file(j));
      return;
    case StageId::Sampling: {
      const auto j = read_json(out_ / "samples.json");
      samples_.assign(m(), {});
      for (std::size_t a = 0; a < m(); ++a) samples_[a] = j.at(ds_.attribute(a)).get<std::vector<std::size_t>>();
      return;
    }
    case StageId::Probes: {
      const auto j = read_json(out_ / "probes.json");
      probe_results_.assign(m(), {});
      for (std::size_t a = 0; a < m(); ++a) {
        for (const auto& p : j.at(ds_.attribute(a))) {
          const auto probe = annotator::probe_from_json(p, ds_, a);
          if (!probe) throw IoError("invalid probe in probes.json");
          probe_results_[a].push_back(annotator::run_probe(ds_, *probe));
        }
      }
      return;
    }
    case StageId::Guidelines: {
      guidelines_.assign(m(), {});
      for (const auto& g : read_json(out_ / "guidelines.json")) {
        const auto a = ds_.attribute_index(g.at("attr").get<std::string>());
        guidelines_[a] = {a, g.at("text").get<std::string>(), g.at("ok").get<bool>(),
                          g.at("diagnostics").get<std::string>()};
      }
      return;
    }
    case StageId::Labeling: {
      labels_.clear();
      for (const auto& l : read_jsonl(out_ / "labels/llm.jsonl")) labels_.push_back(annotator::label_from_json(l, ds_));
      const auto un = read_json(out_ / "labels/unlabeled.json");
      unlabeled_.assign(m(), {});
      for (std::size_t a = 0; a < m(); ++a) unlabeled_[a] = un.at(ds_.attribute(a)).get<std::vector<std::size_t>>();
      return;
    }
    case StageId::TrainingData: {
      verified_ = criteria::sets_from_json(read_json(out_ / "criteria/verified.json"), ds_.attributes());
      propagated_.assign(m(), {});
      for (std::size_t j = 0; j < m(); ++j) propagated_[j].attr = j;
      for (const auto& l : read_jsonl(out_ / "labels/propagated.jsonl")) {
        const auto a = ds_.attribute_index(l.at("attr").get<std::string>());
        propagated_[a].cells.push_back({l.at("row").get<std::size_t>(), l.at("label").get<std::string>() == "error",
                                        training::provenance_from_string(l.at("provenance").get<std::string>())});
      }
      per_attr("features/final", final_);
      training_.resize(m());
      for (std::size_t j = 0; j < m(); ++j) training_[j] = training::load_training_set(out_ / "training" / attr_file(j));
      assembly_.assign(m(), {});
      for (const auto& r : read_json(out_ / "training/report.json")) {
        const auto a = ds_.attribute_index(r.at("attr").get<std::string>());
        auto& rep = assembly_[a];
        rep.right = r.at("right").get<std::size_t>();
        rep.errors = r.at("errors").get<std::size_t>();
        rep.synthetic = r.at("synthetic").get<std::size_t>();
        rep.ratio = r.at("ratio").get<double>();
        rep.balanced = r.at("balanced").get<bool>();
        rep.excluded = r.at("excluded").get<bool>();
        rep.diagnostics = r.at("diagnostics").get<std::string>();
      }
      return;
    }
    case StageId::Training: {
      models_.assign(m(), std::nullopt);
      for (const auto& r : read_json(out_ / "models/report.json")) {
        if (!r.at("trained").get<bool>()) continue;
        const auto a = ds_.attribute_index(r.at("attr").get<std::string>());
        models_[a] = detector::load_model(out_ / "models" / attr_file(a));
      }
      return;
    }
    case StageId::Prediction: mask_ = load_mask_csv(out_ / "detection/mask.csv"); return;
    case StageId::Evaluation: {
      const auto j = read_json(out_ / "evaluation.json").at("overall");
      EvalReport r;
      r.precision = j.at("precision").get<double>();
      r.recall = j.at("recall").get<double>();
      r.f1 = j.at("f1").get<double>();
      r.tp = j.at("tp").get<std::size_t>();
      r.fp = j.at("fp").get<std::size_t>();
      r.fn = j.at("fn").get<std::size_t>();
      r.tn = j.at("tn").get<std::size_t>();
      eval_ = r;
      return;
    }
  }
}

RunResult Run::execute() {
  cfg_.validate();
  std::set<StageId> selected(cfg_.stages.begin(), cfg_.stages.end());
  if (selected.empty()) selected.insert(kAllStageIds.begin(), kAllStageIds.end());
  const bool evaluation_requested = !cfg_.stages.empty() && selected.count(StageId::Evaluation);
  if (evaluation_requested && cfg_.truth.empty()) throw ConfigError("evaluation requested without ground truth");
  if (cfg_.truth.empty()) selected.erase(StageId::Evaluation);

  fs::create_directories(out_);
  prepare();

  RunResult result;
  result.out = out_;
  const StageId last = *selected.rbegin();
  bool recomputing = !cfg_.resume;
  for (const auto s : kAllStageIds) {
    if (static_cast<int>(s) > static_cast<int>(last)) break;
    const bool wanted = selected.count(s) > 0;
    const bool have = stage_complete(s);
    try {
      if (wanted && (recomputing || !have)) {
        recomputing = true;
        spdlog::info("stage {}", to_string(s));
        const auto t0 = std::chrono::steady_clock::now();
        written_.clear();
        compute(s);
        record_stage(s);
        timings_[to_string(s)] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.executed.push_back(s);
      } else {
        if (!have) {
          throw ConfigError(std::string("stage ") + to_string(s) +
                            " is not selected and has no complete artifacts to load");
        }
        load(s);
        result.loaded.push_back(s);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const StageFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw StageFailure(s, e.what());
    }
  }

  if (mask_) write_report(out_);

  result.mask = mask_;
  result.eval = eval_;
  auto entries = load_all_ledgers(out_);
  result.usage = llm::usage_report(entries);
  result.provider_calls = provider_calls_;
  for (std::size_t j = 0; j < m(); ++j) {
    AttributeSummary a;
    a.attr = ds_.attribute(j);
    if (j < clusters_.size()) a.clusters = clusters_[j].s;
    a.labeled = static_cast<std::size_t>(
        std::count_if(labels_.begin(), labels_.end(), [j](const annotator::LlmLabel& l) { return l.attr == j; }));
    if (j < unlabeled_.size()) a.unlabeled = unlabeled_[j].size();
    if (j < initial_.size()) a.criteria_initial = initial_[j].size();
    if (j < verified_.size()) a.criteria_verified = verified_[j].size();
    if (j < training_.size()) a.train_rows = training_[j].size();
    if (j < models_.size()) a.trained = models_[j].has_value();
    if (mask_) a.predicted_errors = mask_->count_in_column(j);
    if (mask_ && truth_) a.eval = evaluate_column(*mask_, diff_mask(ds_, *truth_), j);
    result.attributes.push_back(a);
  }

  // Process-specific numbers stay out of the deterministic artifacts.
  Json stats;
  stats["provider_calls"] = provider_calls_;
  Json timings = Json::object();
  for (const auto& [k, v] : timings_) timings[k] = v;
  stats["seconds"] = timings;
  Json charged = Json::object();
  for (const auto& [k, v] : charged_) charged[k] = llm::charged_json(v);
  stats["charged_tokens"] = charged;
  write_file_atomic(out_ / "run_stats.json", stats.dump(2) + "\n");
  return result;
}

}  // namespace

RunResult run_pipeline(const RunConfig& cfg) {
  Run run(cfg);
  return run.execute();
}

void write_report(const fs::path& run_dir) {
  std::vector<std::string> attrs;
  const auto mask = load_mask_csv(run_dir / "detection/mask.csv", &attrs);
  const auto cfg = read_json(run_dir / "config.json");
  const auto truth_path = cfg.value("truth", std::string{});

  save_mask_csv(run_dir / "report/mask.csv", mask, attrs);

  std::string summary = "zeroed run summary\n";
  summary += "cells: " + std::to_string(mask.rows()) + " rows x " + std::to_string(mask.cols()) + " attributes\n";
  summary += "predicted errors: " + std::to_string(mask.count()) + "\n";

  const auto ledger = llm::usage_report(load_all_ledgers(run_dir));
  write_file_atomic(run_dir / "report/ledger.json", llm::attributed_json(ledger).dump(2) + "\n");

  const auto metrics_path = run_dir / "report/metrics.json";
  if (!truth_path.empty()) {
    const auto dirty = load_csv(cfg.at("input").get<std::string>());
    const auto truth = load_csv(truth_path);
    const auto truth_mask = diff_mask(dirty, truth);
    const auto overall = evaluate_detection(mask, truth_mask);
    Json j;
    j["overall"] = eval_json(overall);
    Json per = Json::object();
    char line[160];
    summary += "\nattribute            precision  recall     f1         predicted  actual\n";
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      const auto r = evaluate_column(mask, truth_mask, a);
      per[attrs[a]] = eval_json(r);
      std::snprintf(line, sizeof line, "%-20s %-10.4f %-10.4f %-10.4f %-10zu %zu\n", attrs[a].c_str(), r.precision,
                    r.recall, r.f1, mask.count_in_column(a), truth_mask.count_in_column(a));
      summary += line;
    }
    j["attributes"] = per;
    std::snprintf(line, sizeof line, "%-20s %-10.4f %-10.4f %-10.4f %-10zu %zu\n", "overall", overall.precision,
                  overall.recall, overall.f1, mask.count(), truth_mask.count());
    summary += line;
    write_file_atomic(metrics_path, j.dump(2) + "\n");
  } else {
    if (fs::exists(metrics_path)) fs::remove(metrics_path);
    summary += "\nno ground truth given; metrics omitted\n";
  }

  summary += "\nLLM usage (tokens attributed to each stage, cached calls included)\n";
  char line[160];
  for (const auto s : llm::kAllStages) {
    const auto u = ledger.stage(s);
    std::snprintf(line, sizeof line, "%-10s calls %-6zu prompt %-10zu completion %zu\n", llm::to_string(s), u.calls,
                  u.attributed_prompt_tokens, u.attributed_completion_tokens);
    summary += line;
  }
  std::snprintf(line, sizeof line, "%-10s calls %-6zu prompt %-10zu completion %zu\n", "total", ledger.total.calls,
                ledger.total.attributed_prompt_tokens, ledger.total.attributed_completion_tokens);
  summary += line;
  write_file_atomic(run_dir / "report/summary.txt", summary);
}

std::size_t naive_baseline_tokens(const fs::path& run_dir) {
  const auto cfg = read_json(run_dir / "config.json");
  const auto ds = load_csv(cfg.at("input").get<std::string>());
  const auto corr = read_json(run_dir / "correlations.json").at("correlates");
  std::vector<std::vector<std::size_t>> correlates(ds.num_attributes());
  for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
    for (const auto& name : corr.at(ds.attribute(j))) correlates[j].push_back(ds.attribute_index(name.get<std::string>()));
  }
  return annotator::naive_labeling_tokens(ds, correlates, cfg.at("batch_size").get<std::size_t>());
}

}  // namespace zeroed::pipeline

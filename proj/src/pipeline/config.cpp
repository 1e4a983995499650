#include "zeroed/pipeline/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "zeroed/core/error.hpp"
#include "zeroed/core/files.hpp"

namespace zeroed::pipeline {

namespace {

constexpr std::array<const char*, kStageCount> kStageNames = {
    "features",  "correlations", "criteria",      "criteria_features", "unified",  "clustering", "sampling",
    "probes",    "guidelines",   "labeling",      "training_data",     "training", "prediction", "evaluation"};

// Reads typed keys from one TOML table and remembers which were seen, so
// unknown keys can be reported.
class Reader {
 public:
  Reader(const toml::table& t, std::string prefix) : t_(t), prefix_(std::move(prefix)) {}

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto* node = t_.get(key);
    if (node == nullptr) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (auto v = node->value<bool>()) return void(out = *v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = node->value<std::string>()) return void(out = *v);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto v = node->value<double>()) return void(out = *v);
    } else {
      if (auto v = node->value<std::int64_t>(); v && *v >= 0) return void(out = static_cast<T>(*v));
    }
    throw ConfigError("config key " + prefix_ + key + " has the wrong type");
  }

  void path(const char* key, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    get(key, s);
    if (!s.empty()) out = std::filesystem::path(s).is_absolute() || base.empty() ? std::filesystem::path(s) : base / s;
  }

  const toml::table* sub(const char* key) {
    seen_.insert(key);
    const auto* node = t_.get(key);
    if (node == nullptr) return nullptr;
    if (!node->is_table()) throw ConfigError("config key " + prefix_ + key + " must be a table");
    return node->as_table();
  }

  void reject_unknown() const {
    for (const auto& [k, v] : t_) {
      if (!seen_.count(std::string(k.str()))) throw ConfigError("unknown config key " + prefix_ + std::string(k.str()));
    }
  }

 private:
  const toml::table& t_;
  std::string prefix_;
  std::set<std::string> seen_;
};

}  // namespace

const char* to_string(StageId s) noexcept { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<StageId> stage_id_from_string(std::string_view name) noexcept {
  for (std::size_t k = 0; k < kStageCount; ++k) {
    if (name == kStageNames[k]) return kAllStageIds[k];
  }
  return std::nullopt;
}

std::vector<StageId> parse_stage_selection(std::string_view text) {
  std::set<std::size_t> chosen;
  auto lookup = [](std::string_view name) {
    const auto s = stage_id_from_string(name);
    if (!s) throw ConfigError("unknown stage '" + std::string(name) + "'");
    return static_cast<std::size_t>(*s);
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = text.substr(start, end - start);
    if (!item.empty()) {
      const auto dots = item.find("..");
      if (dots == std::string_view::npos) {
        chosen.insert(lookup(item));
      } else {
        const auto lo = lookup(item.substr(0, dots));
        const auto hi = lookup(item.substr(dots + 2));
        if (lo > hi) throw ConfigError("stage range '" + std::string(item) + "' is reversed");
        for (auto k = lo; k <= hi; ++k) chosen.insert(k);
      }
    }
    start = end + 1;
  }
  if (chosen.empty()) throw ConfigError("empty stage selection");
  std::vector<StageId> out;
  for (const auto k : chosen) out.push_back(kAllStageIds[k]);
  return out;
}

void RunConfig::validate() const {
  if (input.empty()) throw ConfigError("no input CSV given");
  if (!(label_rate > 0.0 && label_rate <= 1.0)) throw ConfigError("label rate must lie in (0, 1]");
  if (batch_size == 0 || batch_size > 20) throw ConfigError("labeling batch size must lie in [1, 20]");
  if (max_criteria == 0) throw ConfigError("max_criteria must be positive");
  if (semantic_dim == 0) throw ConfigError("semantic_dim must be positive");
  if (max_in_flight == 0) throw ConfigError("max_in_flight must be positive");
  if (out.empty()) throw ConfigError("no output directory given");
  if (provider.kind == llm::ProviderConfig::Kind::Oracle && truth.empty()) {
    throw ConfigError("the oracle provider needs a ground-truth CSV");
  }
  if (provider.kind == llm::ProviderConfig::Kind::Http && provider.endpoint.empty()) {
    throw ConfigError("the http provider needs an endpoint");
  }
  train.validate();
}

RunConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(msg.str());
  }
  RunConfig cfg;
  Reader r(root, "");
  r.path("input", cfg.input, base_dir);
  r.path("truth", cfg.truth, base_dir);
  r.path("out", cfg.out, base_dir);
  r.path("cache_dir", cfg.cache_dir, base_dir);
  r.get("label_rate", cfg.label_rate);
  r.get("clusters", cfg.clusters);
  r.get("corr_k", cfg.corr_k);
  r.get("batch_size", cfg.batch_size);
  r.get("max_criteria", cfg.max_criteria);
  r.get("max_in_flight", cfg.max_in_flight);
  r.get("seed", cfg.seed);
  r.get("resume", cfg.resume);
  std::string stages;
  r.get("stages", stages);
  if (!stages.empty()) cfg.stages = parse_stage_selection(stages);
  std::string exec = "parallel";
  r.get("exec", exec);
  if (exec != "parallel" && exec != "serial") throw ConfigError("exec must be 'parallel' or 'serial'");
  cfg.exec = exec == "serial" ? Exec::Serial : Exec::Parallel;

  if (const auto* t = r.sub("provider")) {
    Reader p(*t, "provider.");
    std::string kind = llm::to_string(cfg.provider.kind);
    p.get("kind", kind);
    cfg.provider.kind = llm::provider_kind_from_string(kind);
    p.get("model", cfg.model);
    p.get("endpoint", cfg.provider.endpoint);
    p.get("api_key_env", cfg.provider.api_key_env);
    p.get("timeout_seconds", cfg.provider.timeout_seconds);
    p.get("noise", cfg.provider.noise);
    p.get("seed", cfg.provider.seed);
    p.path("fixtures", cfg.provider.fixtures, base_dir);
    p.get("canned_text", cfg.provider.canned_text);
    p.reject_unknown();
  }
  if (const auto* t = r.sub("features")) {
    Reader f(*t, "features.");
    f.path("embeddings", cfg.embeddings, base_dir);
    f.get("semantic_dim", cfg.semantic_dim);
    f.reject_unknown();
  }
  if (const auto* t = r.sub("detector")) {
    Reader d(*t, "detector.");
    d.get("hidden", cfg.train.hidden);
    d.get("learning_rate", cfg.train.learning_rate);
    d.get("batch_size", cfg.train.batch_size);
    d.get("max_epochs", cfg.train.max_epochs);
    d.get("validation_fraction", cfg.train.validation_fraction);
    d.get("patience", cfg.train.patience);
    std::string opt = detector::to_string(cfg.train.optimizer);
    d.get("optimizer", opt);
    cfg.train.optimizer = detector::optimizer_from_string(opt);
    d.reject_unknown();
  }
  if (const auto* t = r.sub("augment")) {
    Reader a(*t, "augment.");
    a.get("llm_values", cfg.augment.llm_values);
    a.reject_unknown();
  }
  r.reject_unknown();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.parent_path());
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["input"] = cfg.input.string();
  j["truth"] = cfg.truth.string();
  j["embeddings"] = cfg.embeddings.string();
  j["provider"] = {{"kind", llm::to_string(cfg.provider.kind)},
                   {"model", cfg.model},
                   {"endpoint", cfg.provider.endpoint},
                   {"api_key_env", cfg.provider.api_key_env},
                   {"noise", cfg.provider.noise},
                   {"seed", cfg.provider.seed},
                   {"fixtures", cfg.provider.fixtures.string()}};
  j["label_rate"] = cfg.label_rate;
  j["clusters"] = cfg.clusters;
  j["corr_k"] = cfg.corr_k;
  j["batch_size"] = cfg.batch_size;
  j["max_criteria"] = cfg.max_criteria;
  j["semantic_dim"] = cfg.semantic_dim;
  j["seed"] = cfg.seed;
  j["detector"] = {{"hidden", cfg.train.hidden},
                   {"learning_rate", cfg.train.learning_rate},
                   {"batch_size", cfg.train.batch_size},
                   {"max_epochs", cfg.train.max_epochs},
                   {"validation_fraction", cfg.train.validation_fraction},
                   {"patience", cfg.train.patience},
                   {"optimizer", detector::to_string(cfg.train.optimizer)}};
  j["augment"] = {{"llm_values", cfg.augment.llm_values}};
  return j;
}

}  // namespace zeroed::pipeline

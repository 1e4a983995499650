// zeroed: command-line front end for the detection pipeline.
//
//   zeroed detect   --config run.toml [overrides]
//   zeroed evaluate --mask mask.csv --input dirty.csv --truth clean.csv
//   zeroed inject   --synthetic 1000 --out-dir data/   (or --clean table.csv)
//   zeroed report   --run zeroed-run
//
// Exit codes: 0 success, 1 configuration error, 2 stage failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "zeroed/core/csv.hpp"
#include "zeroed/core/error.hpp"
#include "zeroed/core/inject.hpp"
#include "zeroed/core/mask.hpp"
#include "zeroed/core/metrics.hpp"
#include "zeroed/core/synthetic.hpp"
#include "zeroed/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace zeroed;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitStage = 2;

struct DetectOptions {
  std::string config;
  std::optional<std::string> input, truth, provider, model, out, stages, cache_dir, exec;
  std::optional<double> label_rate;
  std::optional<std::size_t> corr_k, clusters;
  std::optional<std::uint64_t> seed;
  bool resume = false;
};

void print_eval(const EvalReport& r) {
  std::printf("precision %.4f  recall %.4f  f1 %.4f  (tp %zu fp %zu fn %zu tn %zu)\n", r.precision, r.recall, r.f1,
              r.tp, r.fp, r.fn, r.tn);
}

int run_detect(const DetectOptions& o) {
  pipeline::RunConfig cfg;
  if (!o.config.empty()) cfg = pipeline::load_config(o.config);
  if (o.input) cfg.input = *o.input;
  if (o.truth) cfg.truth = *o.truth;
  if (o.provider) cfg.provider.kind = llm::provider_kind_from_string(*o.provider);
  if (o.model) cfg.model = *o.model;
  if (o.out) cfg.out = *o.out;
  if (o.cache_dir) cfg.cache_dir = *o.cache_dir;
  if (o.label_rate) cfg.label_rate = *o.label_rate;
  if (o.corr_k) cfg.corr_k = *o.corr_k;
  if (o.clusters) cfg.clusters = *o.clusters;
  if (o.seed) cfg.seed = *o.seed;
  if (o.stages) cfg.stages = pipeline::parse_stage_selection(*o.stages);
  if (o.exec) {
    if (*o.exec != "serial" && *o.exec != "parallel") throw ConfigError("--exec must be serial or parallel");
    cfg.exec = *o.exec == "serial" ? Exec::Serial : Exec::Parallel;
  }
  if (o.resume) cfg.resume = true;
  if (cfg.input.empty()) throw ConfigError("no input table; pass --input or set `input` in the config");

  const auto result = pipeline::run_pipeline(cfg);
  std::printf("run directory: %s\n", result.out.string().c_str());
  std::printf("stages computed %zu, loaded %zu; provider calls %zu\n", result.executed.size(), result.loaded.size(),
              result.provider_calls);
  for (const auto& a : result.attributes) {
    std::printf("  %-16s labeled %-4zu criteria %zu->%zu  train rows %-6zu %s  flagged %zu\n", a.attr.c_str(),
                a.labeled, a.criteria_initial, a.criteria_verified, a.train_rows, a.trained ? "mlp     " : "fallback",
                a.predicted_errors);
  }
  std::printf("tokens: prompt %zu, completion %zu over %zu calls\n", result.usage.total.attributed_prompt_tokens,
              result.usage.total.attributed_completion_tokens, result.usage.total.calls);
  if (result.eval) print_eval(*result.eval);
  return 0;
}

int run_evaluate(const std::string& mask_path, const std::string& input, const std::string& truth) {
  std::vector<std::string> attrs;
  const auto mask = load_mask_csv(mask_path, &attrs);
  const auto dirty = load_csv(input);
  const auto clean = load_csv(truth);
  if (!dirty.same_shape(clean)) throw ConfigError("input and truth tables differ in shape");
  const auto truth_mask = diff_mask(dirty, clean);
  if (mask.rows() != truth_mask.rows() || mask.cols() != truth_mask.cols()) {
    throw ConfigError("mask shape does not match the tables");
  }
  for (std::size_t j = 0; j < attrs.size(); ++j) {
    std::printf("%-16s ", attrs[j].c_str());
    print_eval(evaluate_column(mask, truth_mask, j));
  }
  std::printf("%-16s ", "overall");
  print_eval(evaluate_detection(mask, truth_mask));
  return 0;
}

struct InjectOptions {
  std::string clean;
  std::size_t synthetic = 0;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::optional<double> rate;
};

int run_inject(const InjectOptions& o) {
  if (o.clean.empty() == (o.synthetic == 0)) throw ConfigError("pass exactly one of --clean or --synthetic");
  const Dataset clean = o.synthetic > 0 ? make_synthetic_people(o.synthetic, o.seed) : load_csv(o.clean);
  auto spec = benchmark_injection_spec(o.seed);
  if (o.rate) {
    const double each = *o.rate / 5.0;
    spec.missing = spec.typo = spec.pattern = spec.outlier = spec.rule = each;
  }
  if (o.synthetic == 0) {
    // The bundled rule pairs name synthetic columns; keep only those present.
    std::erase_if(spec.rule_pairs, [&](const auto& p) {
      return !clean.find_attribute(p.first) || !clean.find_attribute(p.second);
    });
    if (spec.rule_pairs.empty()) spec.rule = 0.0;
  }
  const auto res = inject_errors(clean, spec);
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  save_csv(dir / "clean.csv", clean);
  save_csv(dir / "dirty.csv", res.dirty);
  save_mask_csv(dir / "mask.csv", res.mask, clean.attributes());
  std::printf("%zu rows x %zu attributes, %zu corrupted cells\n", clean.num_rows(), clean.num_attributes(),
              res.mask.count());
  for (std::size_t t = 1; t < kErrorTypeCount; ++t) {
    std::printf("  %-8s %zu\n", std::string(to_string(static_cast<ErrorType>(t))).c_str(), res.counts[t]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid LLM/ML error detection for tabular data"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log stage progress");

  DetectOptions det;
  auto* detect = app.add_subcommand("detect", "Run the detection pipeline");
  detect->add_option("--config", det.config, "TOML configuration file")->check(CLI::ExistingFile);
  detect->add_option("--input", det.input, "Dirty input CSV");
  detect->add_option("--truth", det.truth, "Clean ground-truth CSV");
  detect->add_option("--provider", det.provider, "http, oracle, scripted or canned");
  detect->add_option("--model", det.model, "Model name sent to the provider");
  detect->add_option("--label-rate", det.label_rate, "Fraction of rows labeled per attribute");
  detect->add_option("--corr-k", det.corr_k, "Correlated attributes per attribute");
  detect->add_option("--clusters", det.clusters, "Fixed cluster count per attribute");
  detect->add_option("--seed", det.seed, "Random seed");
  detect->add_option("--out", det.out, "Run directory");
  detect->add_option("--cache-dir", det.cache_dir, "LLM response cache directory");
  detect->add_option("--stages", det.stages, "Stage selection, e.g. features..labeling,prediction");
  detect->add_option("--exec", det.exec, "serial or parallel kernels");
  detect->add_flag("--resume", det.resume, "Reuse complete artifacts from a previous run");

  std::string mask_path, eval_input, eval_truth;
  auto* evaluate = app.add_subcommand("evaluate", "Score a detection mask against ground truth");
  evaluate->add_option("--mask", mask_path, "Predicted mask CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--input", eval_input, "Dirty CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", eval_truth, "Clean CSV")->required()->check(CLI::ExistingFile);

  InjectOptions inj;
  auto* inject = app.add_subcommand("inject", "Write a dirty/clean benchmark pair");
  inject->add_option("--clean", inj.clean, "Clean CSV to corrupt")->check(CLI::ExistingFile);
  inject->add_option("--synthetic", inj.synthetic, "Generate a synthetic table with this many rows");
  inject->add_option("--out-dir", inj.out_dir, "Output directory");
  inject->add_option("--seed", inj.seed, "Random seed");
  inject->add_option("--rate", inj.rate, "Total error rate, split evenly over the five types")
      ->check(CLI::Range(0.0, 1.0));

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Re-emit report files from a run directory");
  report->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*detect) return run_detect(det);
    if (*evaluate) return run_evaluate(mask_path, eval_input, eval_truth);
    if (*inject) return run_inject(inj);
    if (*report) {
      pipeline::write_report(run_dir);
      std::cout << (fs::path(run_dir) / "report" / "summary.txt").string() << "\n";
      return 0;
    }
  } catch (const pipeline::StageFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitStage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    // Outside the pipeline, unreadable inputs are the caller's to fix.
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}

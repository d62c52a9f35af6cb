// actparse: command-line front end for synthetic data generation, training,
// parsing, baselines, evaluation and the brute-force self check.

#include <actparse/actparse.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>

namespace {

using namespace actparse;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidInput = 2,
  kNoValidParse = 3,
  kConfigError = 4,
};

int run_synth(const std::string& spec_path, const std::string& out_dir) {
  const GenSpec spec = load_gen_spec(spec_path);
  const auto data = generate(spec);
  write_dataset(out_dir, data, spec.labels);
  std::printf("wrote %zu sequences to %s\n", data.size(), out_dir.c_str());
  return kOk;
}

int run_train(const std::string& data_dir, const std::string& config_path,
              const std::string& model_out) {
  const RunConfig rc = load_config(config_path);
  const TrainingCorpus corpus = read_dataset(data_dir);
  TrainingReport report;
  const PipelineModel model = train_pipeline(corpus, rc.parser, rc.train, &report);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  save_model(model_out, model);
  std::printf("trained on %zu segments from %zu sequences (%zu split, %zu skipped)\n",
              report.segments_used, corpus.sequences.size(), report.segments_split,
              report.segments_skipped);
  return kOk;
}

int run_parse(const std::string& features, const std::string& model_path,
              const std::string& out, std::optional<double> penalty) {
  const PipelineModel model = load_model(model_path);
  const FrameSequence seq = load_features(features);
  ParserConfig config = model.config;
  if (penalty) config.segment_penalty = *penalty;
  const Parse p = parse(seq, model.first_layer, model.second_layer, config);
  const auto v = validate_parse(p, seq.frame_count(), config);
  if (!v.ok()) throw Error("internal error: produced an invalid parse: " + v.problems.front());
  save_parse(out, p, model.first_layer.labels());
  std::printf("%zu segments, total score %.6f\n", p.segment_count(), p.total_score);
  return kOk;
}

int run_baseline(const std::string& method, const std::string& features,
                 const std::string& model_path, const std::string& out, std::size_t window,
                 std::optional<std::size_t> stride, std::optional<double> penalty) {
  const PipelineModel model = load_model(model_path);
  const FrameSequence seq = load_features(features);
  Parse p;
  if (method == "sliding") {
    const std::size_t s = stride.value_or(std::max<std::size_t>(1, window / 2));
    p = frame_labels_to_parse(sliding_window_labels(seq, model.first_layer, window, s));
  } else {
    ParserConfig config = model.config;
    if (penalty) config.segment_penalty = *penalty;
    p = no_context_parse(seq, model.first_layer, config);
  }
  save_parse(out, p, model.first_layer.labels());
  std::printf("%zu segments\n", p.segment_count());
  return kOk;
}

int run_eval(const std::string& pred_path, const std::string& truth_path, bool exclude_bg,
             bool show_confusion) {
  const Annotation truth = load_annotations(truth_path);
  const Parse pred = load_annotations(pred_path, truth.labels);
  const auto t = parse_to_frame_labels(truth.parse);
  const auto p = parse_to_frame_labels(pred);
  std::optional<ClassIndex> excluded;
  if (exclude_bg) excluded = truth.labels.background();
  const double acc = per_frame_accuracy(p, t, excluded);
  std::printf("per_frame_accuracy %.6f\n", acc);
  if (show_confusion) {
    const auto cm = confusion_matrix(p, t, truth.labels.size());
    std::printf("confusion (rows: truth, columns: predicted)\n");
    for (ClassIndex r = 0; r < cm.classes; ++r) {
      std::printf("%-12s", truth.labels.name(r).c_str());
      for (ClassIndex c = 0; c < cm.classes; ++c) std::printf(" %8zu", cm.at(r, c));
      std::printf("\n");
    }
  }
  return kOk;
}

int run_verify(std::size_t instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> length(8, 30);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t n = length(rng);
    const auto table = TableScorer::random(n, 2, 6, 3, rng);
    const Parse dp = parse_with_scorer(table, n, 2, 6);
    const Parse bf = brute_force_parse(table, n, 2, 6);
    const bool valid = validate_parse(dp, n, 2, 6).ok();
    if (!valid || std::abs(dp.total_score - bf.total_score) > 1e-9) {
      ++failures;
      std::printf("instance %zu (frames %zu): dp %.12f brute force %.12f%s\n", i, n,
                  dp.total_score, bf.total_score, valid ? "" : " (invalid parse)");
    }
  }
  std::printf("verify: %zu/%zu instances agree with brute force\n", instances - failures,
              instances);
  return failures == 0 ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal action parsing with context features"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from a GenSpec JSON");
  synth->add_option("--spec", spec_path, "Generator spec (JSON)")->required();
  synth->add_option("--out", out_dir, "Output dataset directory")->required();

  std::string data_dir, config_path, model_out;
  auto* train = app.add_subcommand("train", "Train both classifier layers");
  train->add_option("--data", data_dir, "Dataset directory with manifest.json")->required();
  train->add_option("--config", config_path, "Configuration (JSON)")->required();
  train->add_option("--model-out", model_out, "Model output file")->required();

  std::string features, model_path, out;
  std::optional<double> penalty;
  auto* parse_cmd = app.add_subcommand("parse", "Parse a feature sequence into segments");
  parse_cmd->add_option("--features", features, "Per-frame features (CSV)")->required();
  parse_cmd->add_option("--model", model_path, "Trained model (JSON)")->required();
  parse_cmd->add_option("--out", out, "Parse output (JSON)")->required();
  parse_cmd->add_option("--penalty", penalty, "Per-segment penalty (overrides the model's)");

  std::string pred_path, truth_path;
  bool exclude_bg = false;
  bool show_confusion = false;
  auto* eval = app.add_subcommand("eval", "Per-frame accuracy of a parse against ground truth");
  eval->add_option("--pred", pred_path, "Predicted parse (JSON)")->required();
  eval->add_option("--truth", truth_path, "Ground-truth annotation (JSON)")->required();
  eval->add_flag("--exclude-background", exclude_bg, "Skip frames whose true label is background");
  eval->add_flag("--confusion", show_confusion, "Print the confusion matrix");

  std::string method;
  std::size_t window = 75;
  std::optional<std::size_t> stride;
  auto* baseline = app.add_subcommand("baseline", "Run a comparison method");
  baseline->add_option("--method", method, "sliding or nocontext")
      ->required()
      ->check(CLI::IsMember({"sliding", "nocontext"}));
  baseline->add_option("--features", features, "Per-frame features (CSV)")->required();
  baseline->add_option("--model", model_path, "Trained model (JSON)")->required();
  baseline->add_option("--out", out, "Output (JSON)")->required();
  baseline->add_option("--window", window, "Sliding window length L")->capture_default_str();
  baseline->add_option("--stride", stride, "Sliding window stride (default L/2)");
  baseline->add_option("--penalty", penalty, "Per-segment penalty for nocontext");

  std::size_t instances = 200;
  std::uint64_t verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "Check the DP parser against brute force");
  verify->add_option("--instances", instances, "Random instances")->capture_default_str();
  verify->add_option("--seed", verify_seed, "Random seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return run_synth(spec_path, out_dir);
    if (*train) return run_train(data_dir, config_path, model_out);
    if (*parse_cmd) return run_parse(features, model_path, out, penalty);
    if (*baseline)
      return run_baseline(method, features, model_path, out, window, stride, penalty);
    if (*eval) return run_eval(pred_path, truth_path, exclude_bg, show_confusion);
    if (*verify) return run_verify(instances, verify_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NoValidParse& e) {
    std::cerr << e.what() << "\n";
    return kNoValidParse;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

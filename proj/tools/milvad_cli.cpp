// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the engine exclusively through the C API.
//
// Exit codes: 0 success, 1 validation/format error, 2 usage error,
// 3 runtime numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "milvad/milvad.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct PlanDeleter {
  void operator()(milvad_plan* p) const { milvad_plan_destroy(p); }
};
struct BagsetDeleter {
  void operator()(milvad_bagset* p) const { milvad_bagset_destroy(p); }
};
struct ModelDeleter {
  void operator()(milvad_model* p) const { milvad_model_destroy(p); }
};
struct ReportDeleter {
  void operator()(milvad_eval_report* p) const { milvad_eval_report_destroy(p); }
};
struct StringDeleter {
  void operator()(char* p) const { milvad_string_free(p); }
};

using PlanPtr = std::unique_ptr<milvad_plan, PlanDeleter>;
using BagsetPtr = std::unique_ptr<milvad_bagset, BagsetDeleter>;
using ModelPtr = std::unique_ptr<milvad_model, ModelDeleter>;
using ReportPtr = std::unique_ptr<milvad_eval_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Thrown after a failed API call has been reported on stderr.
struct Failure {
  int exit_code;
};

void check(milvad_status status, const std::string& context) {
  if (status == MILVAD_OK) return;
  std::cerr << "milvad: " << context << ": [" << milvad_status_name(status) << "] "
            << milvad_last_error() << "\n";
  const bool numeric = status == MILVAD_ERR_NUMERIC || status == MILVAD_ERR_INTERNAL;
  throw Failure{numeric ? kExitNumeric : kExitInvalid};
}

BagsetPtr load_bags(const std::string& path) {
  milvad_bagset* raw = nullptr;
  check(milvad_bagset_load(path.c_str(), &raw), "loading " + path);
  return BagsetPtr(raw);
}

ModelPtr load_model(const std::string& path) {
  milvad_model* raw = nullptr;
  check(milvad_model_load(path.c_str(), &raw), "loading " + path);
  return ModelPtr(raw);
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct PlanArgs {
  std::int64_t frames = 0;
  std::int64_t segments = 32;
  std::int64_t frames_per_segment = 16;
};

int run_plan(const PlanArgs& args) {
  milvad_plan* raw = nullptr;
  check(milvad_plan_create(args.frames, args.segments, args.frames_per_segment, &raw), "plan");
  PlanPtr plan(raw);
  std::vector<std::int64_t> indices(milvad_plan_frames_per_segment(plan.get()));
  std::string out;
  for (std::size_t s = 0; s < milvad_plan_num_segments(plan.get()); ++s) {
    std::int64_t start = 0;
    std::int64_t end = 0;
    check(milvad_plan_segment(plan.get(), s, &start, &end, indices.data()), "plan");
    out += std::to_string(s) + ' ' + std::to_string(start) + ' ' + std::to_string(end);
    for (std::int64_t i : indices) out += ' ' + std::to_string(i);
    out += '\n';
  }
  std::cout << out;
  return kExitOk;
}

struct SynthArgs {
  milvad_synth_config config{};
  std::string out;
  std::string masks;
};

int run_synth(const SynthArgs& args) {
  check(milvad_synth_write(&args.config, args.out.c_str(), args.masks.empty() ? nullptr : args.masks.c_str()),
        "synth");
  std::cout << "wrote " << (args.config.num_normal + args.config.num_anomalous) << " videos to "
            << args.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  milvad_train_config config{};
  std::string features;
  std::string val;
  std::string out;
  std::vector<std::size_t> hidden;
};

void print_epoch(std::size_t epoch, double loss, int has_val, double val_auc, void*) {
  std::string line = std::to_string(epoch) + ' ' + fixed6(loss);
  if (has_val != 0) line += ' ' + fixed6(val_auc);
  std::cout << line << '\n' << std::flush;
}

int run_train(TrainArgs& args) {
  if (!args.hidden.empty()) {
    if (args.hidden.size() != 3) {
      std::cerr << "milvad: --hidden takes exactly three sizes\n";
      return kExitUsage;
    }
    for (int i = 0; i < 3; ++i) args.config.hidden_sizes[i] = args.hidden[static_cast<std::size_t>(i)];
  }
  BagsetPtr train = load_bags(args.features);
  BagsetPtr val;
  if (!args.val.empty()) val = load_bags(args.val);

  milvad_model* raw = nullptr;
  check(milvad_train(train.get(), val.get(), &args.config, print_epoch, nullptr, &raw), "train");
  ModelPtr model(raw);
  check(milvad_model_save(model.get(), args.out.c_str()), "saving " + args.out);
  return kExitOk;
}

struct ScoreArgs {
  std::string features;
  std::string checkpoint;
  std::size_t k = 3;
};

int run_score(const ScoreArgs& args) {
  BagsetPtr bags = load_bags(args.features);
  ModelPtr model = load_model(args.checkpoint);
  std::vector<double> scores(milvad_bagset_num_segments(bags.get()));
  std::string out;
  for (std::size_t v = 0; v < milvad_bagset_size(bags.get()); ++v) {
    double probability = 0.0;
    check(milvad_score_video(model.get(), bags.get(), v, args.k, &probability, scores.data()), "score");
    out += milvad_bagset_video_id(bags.get(), v);
    out += ' ' + fixed6(probability);
    for (double s : scores) out += ' ' + fixed6(s);
    out += '\n';
  }
  std::cout << out;
  return kExitOk;
}

struct EvalArgs {
  std::string features;
  std::string checkpoint;
  std::string report;
  std::size_t k = 3;
};

int run_eval(const EvalArgs& args) {
  BagsetPtr bags = load_bags(args.features);
  ModelPtr model = load_model(args.checkpoint);
  milvad_eval_report* raw = nullptr;
  check(milvad_evaluate(model.get(), bags.get(), args.k, &raw), "eval");
  ReportPtr report(raw);
  char* text_raw = nullptr;
  check(milvad_eval_report_csv(report.get(), &text_raw), "eval");
  StringPtr text(text_raw);
  if (!args.report.empty()) {
    std::ofstream file(args.report, std::ios::binary | std::ios::trunc);
    file << text.get();
    if (!file) {
      std::cerr << "milvad: cannot write report to " << args.report << "\n";
      return kExitInvalid;
    }
  }
  std::cout << text.get();
  return kExitOk;
}

int run_inspect(const std::string& path) {
  char* raw = nullptr;
  const milvad_status status = milvad_inspect(path.c_str(), &raw);
  if (status != MILVAD_OK) {
    std::cout << "invalid: [" << milvad_status_name(status) << "] " << milvad_last_error() << "\n";
    return kExitInvalid;
  }
  StringPtr text(raw);
  std::cout << text.get();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"milvad: weakly supervised video anomaly scoring on precomputed segment features"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Print the segment / frame sampling plan for a video");
  plan->add_option("--frames", plan_args.frames, "Frame count of the video")->required();
  plan->add_option("--segments", plan_args.segments, "Temporal segments per video")->capture_default_str();
  plan->add_option("--frames-per-segment", plan_args.frames_per_segment, "Frames sampled per segment")
      ->capture_default_str();

  SynthArgs synth_args;
  milvad_synth_config_init(&synth_args.config);
  auto& sc = synth_args.config;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic bag file");
  synth->add_option("--seed", sc.seed, "Dataset seed (fixes the planted direction)")->capture_default_str();
  synth->add_option("--stream", sc.stream, "Sample stream; use distinct streams for train/test splits")
      ->capture_default_str();
  synth->add_option("--normal", sc.num_normal, "Number of normal videos")->capture_default_str();
  synth->add_option("--anomalous", sc.num_anomalous, "Number of anomalous videos")->capture_default_str();
  synth->add_option("--segments", sc.num_segments, "Segments per video")->capture_default_str();
  synth->add_option("--i3d-dim", sc.i3d_dim, "First backbone feature width")->capture_default_str();
  synth->add_option("--tsf-dim", sc.tsf_dim, "Second backbone feature width")->capture_default_str();
  synth->add_option("--planted", sc.anomalous_segments_per_video, "Anomalous segments per anomalous video")
      ->capture_default_str();
  synth->add_option("--shift", sc.signal_shift, "Planted shift in base standard deviations")
      ->capture_default_str();
  synth->add_option("--out", synth_args.out, "Output bag file")->required();
  synth->add_option("--masks", synth_args.masks, "Optional ground-truth mask file");

  TrainArgs train_args;
  milvad_train_config_init(&train_args.config);
  auto& tc = train_args.config;
  auto* train = app.add_subcommand("train", "Train the scoring head; prints 'epoch loss [val_auc]'");
  train->add_option("--features", train_args.features, "Training bag file")->required();
  train->add_option("--val", train_args.val, "Validation bag file");
  train->add_option("--k", tc.k, "Top-k pooling size")->capture_default_str();
  train->add_option("--epochs", tc.epochs, "Training epochs")->capture_default_str();
  train->add_option("--batch-pairs", tc.batch_pairs, "Normal/anomalous pairs per batch")->capture_default_str();
  train->add_option("--lr", tc.learning_rate, "Learning rate")->capture_default_str();
  train->add_option("--seed", tc.seed, "Seed for initialization and shuffling")->capture_default_str();
  train->add_option("--hidden", train_args.hidden, "Hidden widths h1,h2,h3")->delimiter(',');
  train->add_option("--slope", tc.leaky_slope, "LeakyReLU negative slope")->capture_default_str();
  train->add_option("--out", train_args.out, "Output checkpoint")->required();

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Print 'video_id probability s_1 .. s_N' per video");
  score->add_option("--features", score_args.features, "Bag file")->required();
  score->add_option("--checkpoint", score_args.checkpoint, "Head checkpoint")->required();
  score->add_option("--k", score_args.k, "Top-k pooling size")->capture_default_str();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Video-level AUC report as CSV rows plus 'AUC,<value>'");
  eval->add_option("--features", eval_args.features, "Bag file")->required();
  eval->add_option("--checkpoint", eval_args.checkpoint, "Head checkpoint")->required();
  eval->add_option("--k", eval_args.k, "Top-k pooling size")->capture_default_str();
  eval->add_option("--report", eval_args.report, "Also write the report to this path");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Validate a bag file and summarize it");
  inspect->add_option("file", inspect_path, "Bag file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    const auto parsed = app.get_subcommands();
    std::cerr << "milvad: " << e.what() << "\n\n" << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitUsage;
  }

  try {
    if (plan->parsed()) return run_plan(plan_args);
    if (synth->parsed()) return run_synth(synth_args);
    if (train->parsed()) return run_train(train_args);
    if (score->parsed()) return run_score(score_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (inspect->parsed()) return run_inspect(inspect_path);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitUsage;
}

// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/milvad.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "milvad/checkpoint.hpp"
#include "milvad/error.hpp"
#include "milvad/eval.hpp"
#include "milvad/feature_store.hpp"
#include "milvad/fusion.hpp"
#include "milvad/synth.hpp"
#include "milvad/temporal_plan.hpp"
#include "milvad/trainer.hpp"

struct milvad_plan {
  milvad::SamplingPlan plan;
};

struct milvad_bagset {
  std::vector<milvad::SegmentFeatureBag> raw;
  std::vector<milvad::FusedBag> fused;
};

struct milvad_model {
  milvad::HeadParameters params;
};

struct milvad_eval_report {
  milvad::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

milvad_status fail(milvad_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

milvad_status null_argument(const char* name) {
  return fail(MILVAD_ERR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

// Runs `body` and translates exceptions into status codes.
template <typename Body>
milvad_status guarded(Body&& body) {
  g_last_error.clear();
  try {
    body();
    return MILVAD_OK;
  } catch (const milvad::Error& e) {
    return fail(static_cast<milvad_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MILVAD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MILVAD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MILVAD_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

milvad::SynthConfig to_cpp(const milvad_synth_config& c) {
  milvad::SynthConfig config;
  config.seed = c.seed;
  config.stream = c.stream;
  config.num_normal = c.num_normal;
  config.num_anomalous = c.num_anomalous;
  config.num_segments = c.num_segments;
  config.i3d_dim = c.i3d_dim;
  config.tsf_dim = c.tsf_dim;
  config.anomalous_segments_per_video = c.anomalous_segments_per_video;
  config.signal_shift = c.signal_shift;
  return config;
}

milvad::TrainConfig to_cpp(const milvad_train_config& c) {
  milvad::TrainConfig config;
  config.k = c.k;
  config.epochs = c.epochs;
  config.batch_pairs = c.batch_pairs;
  config.learning_rate = c.learning_rate;
  config.moment_decay_1 = c.moment_decay_1;
  config.moment_decay_2 = c.moment_decay_2;
  config.epsilon = c.epsilon;
  config.seed = c.seed;
  config.hidden_sizes = {c.hidden_sizes[0], c.hidden_sizes[1], c.hidden_sizes[2]};
  config.leaky_slope = c.leaky_slope;
  return config;
}

}  // namespace

extern "C" {

const char* milvad_version(void) { return "0.1.0"; }

const char* milvad_status_name(milvad_status status) {
  return milvad::error_code_name(static_cast<milvad::ErrorCode>(status));
}

const char* milvad_last_error(void) { return g_last_error.c_str(); }

void milvad_string_free(char* text) { std::free(text); }

milvad_status milvad_plan_create(int64_t frame_count, int64_t num_segments,
                                 int64_t frames_per_segment, milvad_plan** out) {
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    milvad::VideoManifest manifest{"", frame_count, 0};
    auto plan = std::make_unique<milvad_plan>();
    plan->plan = milvad::build_plan(manifest, num_segments, frames_per_segment);
    *out = plan.release();
  });
}

void milvad_plan_destroy(milvad_plan* plan) { delete plan; }

size_t milvad_plan_num_segments(const milvad_plan* plan) {
  return plan == nullptr ? 0 : plan->plan.segments.size();
}

size_t milvad_plan_frames_per_segment(const milvad_plan* plan) {
  return plan == nullptr ? 0 : static_cast<size_t>(plan->plan.frames_per_segment);
}

milvad_status milvad_plan_segment(const milvad_plan* plan, size_t segment, int64_t* start,
                                  int64_t* end, int64_t* indices) {
  if (plan == nullptr) return null_argument("plan");
  if (segment >= plan->plan.segments.size()) {
    return fail(MILVAD_ERR_INVALID_ARGUMENT, "segment index out of range");
  }
  const auto& range = plan->plan.segments[segment];
  if (start != nullptr) *start = range.start;
  if (end != nullptr) *end = range.end;
  if (indices != nullptr) {
    const auto& sampled = plan->plan.sampled_indices[segment];
    std::copy(sampled.begin(), sampled.end(), indices);
  }
  return MILVAD_OK;
}

milvad_status milvad_bagset_load(const char* path, milvad_bagset** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto bags = std::make_unique<milvad_bagset>();
    bags->raw = milvad::read_bags(path);
    bags->fused = milvad::fuse_bags(bags->raw);
    *out = bags.release();
  });
}

void milvad_bagset_destroy(milvad_bagset* bags) { delete bags; }

size_t milvad_bagset_size(const milvad_bagset* bags) { return bags == nullptr ? 0 : bags->raw.size(); }

size_t milvad_bagset_num_segments(const milvad_bagset* bags) {
  return bags == nullptr || bags->fused.empty() ? 0 : bags->fused.front().num_segments();
}

size_t milvad_bagset_fused_dim(const milvad_bagset* bags) {
  return bags == nullptr || bags->fused.empty() ? 0 : bags->fused.front().width();
}

const char* milvad_bagset_video_id(const milvad_bagset* bags, size_t index) {
  if (bags == nullptr || index >= bags->raw.size()) return nullptr;
  return bags->raw[index].video_id.c_str();
}

int milvad_bagset_label(const milvad_bagset* bags, size_t index) {
  if (bags == nullptr || index >= bags->raw.size()) return -1;
  return bags->raw[index].label;
}

milvad_status milvad_inspect(const char* path, char** report_text) {
  if (path == nullptr) return null_argument("path");
  if (report_text == nullptr) return null_argument("report_text");
  *report_text = nullptr;
  return guarded([&] {
    const milvad::ValidationReport report = milvad::validate_bags(path);
    if (!report.ok) throw milvad::Error(report.error, report.message);
    *report_text = copy_string(report.to_text());
  });
}

void milvad_synth_config_init(milvad_synth_config* config) {
  if (config == nullptr) return;
  const milvad::SynthConfig d;
  *config = {d.seed,          d.stream,  d.num_normal, d.num_anomalous,
             d.num_segments,  d.i3d_dim, d.tsf_dim,    d.anomalous_segments_per_video,
             d.signal_shift};
}

milvad_status milvad_synth_write(const milvad_synth_config* config, const char* bags_path,
                                 const char* masks_path) {
  if (config == nullptr) return null_argument("config");
  if (bags_path == nullptr) return null_argument("bags_path");
  return guarded([&] {
    const milvad::SynthDataset data = milvad::generate(to_cpp(*config));
    milvad::write_bags(bags_path, data.bags);
    if (masks_path != nullptr) {
      milvad::write_masks(masks_path, data.masks);
    }
  });
}

milvad_status milvad_synth_oracle_auc(const milvad_synth_config* config, size_t k, double* auc) {
  if (config == nullptr) return null_argument("config");
  if (auc == nullptr) return null_argument("auc");
  return guarded([&] {
    const milvad::SynthConfig cpp = to_cpp(*config);
    const milvad::SynthDataset data = milvad::generate(cpp);
    *auc = milvad::oracle_auc(data.bags, data.masks, cpp, k);
  });
}

milvad_status milvad_model_load(const char* path, milvad_model** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto model = std::make_unique<milvad_model>();
    model->params = milvad::load_checkpoint(path);
    *out = model.release();
  });
}

milvad_status milvad_model_save(const milvad_model* model, const char* path) {
  if (model == nullptr) return null_argument("model");
  if (path == nullptr) return null_argument("path");
  return guarded([&] { milvad::save_checkpoint(path, model->params); });
}

void milvad_model_destroy(milvad_model* model) { delete model; }

size_t milvad_model_input_dim(const milvad_model* model) {
  return model == nullptr ? 0 : model->params.input_dim();
}

void milvad_train_config_init(milvad_train_config* config) {
  if (config == nullptr) return;
  const milvad::TrainConfig d;
  config->k = d.k;
  config->epochs = d.epochs;
  config->batch_pairs = d.batch_pairs;
  config->learning_rate = d.learning_rate;
  config->moment_decay_1 = d.moment_decay_1;
  config->moment_decay_2 = d.moment_decay_2;
  config->epsilon = d.epsilon;
  config->seed = d.seed;
  for (int i = 0; i < 3; ++i) config->hidden_sizes[i] = d.hidden_sizes[static_cast<std::size_t>(i)];
  config->leaky_slope = d.leaky_slope;
}

milvad_status milvad_train(const milvad_bagset* train, const milvad_bagset* val,
                           const milvad_train_config* config, milvad_epoch_callback on_epoch,
                           void* user_data, milvad_model** out) {
  if (train == nullptr) return null_argument("train");
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    milvad::EpochCallback callback;
    if (on_epoch != nullptr) {
      callback = [&](const milvad::EpochStats& stats) {
        on_epoch(stats.epoch, stats.mean_loss, stats.val_auc.has_value() ? 1 : 0,
                 stats.val_auc.value_or(0.0), user_data);
      };
    }
    std::span<const milvad::FusedBag> val_bags;
    if (val != nullptr) val_bags = val->fused;
    milvad::TrainRunRecord record = milvad::train(train->fused, val_bags, to_cpp(*config), callback);
    auto model = std::make_unique<milvad_model>();
    model->params = std::move(record.params);
    *out = model.release();
  });
}

milvad_status milvad_score_video(const milvad_model* model, const milvad_bagset* bags, size_t index,
                                 size_t k, double* probability, double* segment_scores) {
  if (model == nullptr) return null_argument("model");
  if (bags == nullptr) return null_argument("bags");
  if (index >= bags->fused.size()) return fail(MILVAD_ERR_INVALID_ARGUMENT, "video index out of range");
  return guarded([&] {
    const milvad::VideoScore score = milvad::score_video(bags->fused[index], model->params, k);
    if (probability != nullptr) *probability = score.probability;
    if (segment_scores != nullptr) {
      std::copy(score.segment_scores.begin(), score.segment_scores.end(), segment_scores);
    }
  });
}

milvad_status milvad_evaluate(const milvad_model* model, const milvad_bagset* bags, size_t k,
                              milvad_eval_report** out) {
  if (model == nullptr) return null_argument("model");
  if (bags == nullptr) return null_argument("bags");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto report = std::make_unique<milvad_eval_report>();
    report->report = milvad::evaluate(bags->fused, model->params, k);
    *out = report.release();
  });
}

void milvad_eval_report_destroy(milvad_eval_report* report) { delete report; }

double milvad_eval_report_auc(const milvad_eval_report* report) {
  return report == nullptr ? 0.0 : report->report.auc;
}

size_t milvad_eval_report_size(const milvad_eval_report* report) {
  return report == nullptr ? 0 : report->report.rows.size();
}

milvad_status milvad_eval_report_row(const milvad_eval_report* report, size_t row,
                                     const char** video_id, int* label, double* probability) {
  if (report == nullptr) return null_argument("report");
  if (row >= report->report.rows.size()) return fail(MILVAD_ERR_INVALID_ARGUMENT, "row out of range");
  const auto& r = report->report.rows[row];
  if (video_id != nullptr) *video_id = r.video_id.c_str();
  if (label != nullptr) *label = r.label;
  if (probability != nullptr) *probability = r.probability;
  return MILVAD_OK;
}

milvad_status milvad_eval_report_csv(const milvad_eval_report* report, char** text) {
  if (report == nullptr) return null_argument("report");
  if (text == nullptr) return null_argument("text");
  *text = nullptr;
  return guarded([&] { *text = copy_string(report->report.to_csv()); });
}

milvad_status milvad_roc_auc(const double* scores, const int* labels, size_t count, double* auc) {
  if ((scores == nullptr || labels == nullptr) && count > 0) return null_argument("scores/labels");
  if (auc == nullptr) return null_argument("auc");
  return guarded([&] {
    *auc = milvad::roc_auc(std::span<const double>(scores, count), std::span<const int>(labels, count));
  });
}

}  // extern "C"

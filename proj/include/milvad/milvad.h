/* SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors */
/* SPDX-License-Identifier: Apache-2.0 */

/*
 * milvad C API: weakly supervised video anomaly scoring over precomputed
 * segment features.
 *
 * Every fallible call returns a milvad_status. On failure a description is
 * available from milvad_last_error() on the same thread until the next API
 * call on that thread. Objects are opaque handles released with their
 * matching *_destroy function; destroy functions accept NULL. Strings
 * returned through char** out-parameters are owned by the caller and
 * released with milvad_string_free.
 */

#ifndef MILVAD_H
#define MILVAD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MILVAD_BUILDING_LIBRARY)
#    define MILVAD_API __declspec(dllexport)
#  else
#    define MILVAD_API __declspec(dllimport)
#  endif
#else
#  define MILVAD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum milvad_status {
  MILVAD_OK = 0,
  MILVAD_ERR_INVALID_ARGUMENT = 1,
  MILVAD_ERR_IO = 2,
  MILVAD_ERR_BAD_MAGIC = 3,
  MILVAD_ERR_UNSUPPORTED_VERSION = 4,
  MILVAD_ERR_HEADER_CHECKSUM = 5,
  MILVAD_ERR_TRUNCATED = 6,
  MILVAD_ERR_NON_FINITE = 7,
  MILVAD_ERR_DIMENSION_MISMATCH = 8,
  MILVAD_ERR_CORRUPT_RECORD = 9,
  MILVAD_ERR_NUMERIC = 10,
  MILVAD_ERR_INTERNAL = 11
} milvad_status;

MILVAD_API const char* milvad_version(void);
MILVAD_API const char* milvad_status_name(milvad_status status);
MILVAD_API const char* milvad_last_error(void);
MILVAD_API void milvad_string_free(char* text);

/* ---- Temporal sampling plans ------------------------------------------ */

typedef struct milvad_plan milvad_plan;

MILVAD_API milvad_status milvad_plan_create(int64_t frame_count, int64_t num_segments,
                                            int64_t frames_per_segment, milvad_plan** out);
MILVAD_API void milvad_plan_destroy(milvad_plan* plan);
MILVAD_API size_t milvad_plan_num_segments(const milvad_plan* plan);
MILVAD_API size_t milvad_plan_frames_per_segment(const milvad_plan* plan);
/* `indices` may be NULL; otherwise it receives frames_per_segment entries. */
MILVAD_API milvad_status milvad_plan_segment(const milvad_plan* plan, size_t segment,
                                             int64_t* start, int64_t* end, int64_t* indices);

/* ---- Feature bag files ------------------------------------------------- */

typedef struct milvad_bagset milvad_bagset;

/* Reads and validates a MILBAGS1 file; features are fused on load. */
MILVAD_API milvad_status milvad_bagset_load(const char* path, milvad_bagset** out);
MILVAD_API void milvad_bagset_destroy(milvad_bagset* bags);
MILVAD_API size_t milvad_bagset_size(const milvad_bagset* bags);
MILVAD_API size_t milvad_bagset_num_segments(const milvad_bagset* bags);
MILVAD_API size_t milvad_bagset_fused_dim(const milvad_bagset* bags);
/* Returns NULL / -1 for an out-of-range index. */
MILVAD_API const char* milvad_bagset_video_id(const milvad_bagset* bags, size_t index);
MILVAD_API int milvad_bagset_label(const milvad_bagset* bags, size_t index);

/* Validation report text ("<n> videos, labels: <normal>/<anomalous>" plus a
 * dimensions line). On failure the status names the format error and
 * milvad_last_error() localizes it. */
MILVAD_API milvad_status milvad_inspect(const char* path, char** report_text);

/* ---- Synthetic datasets ------------------------------------------------ */

typedef struct milvad_synth_config {
  uint64_t seed;
  uint32_t stream;
  size_t num_normal;
  size_t num_anomalous;
  size_t num_segments;
  size_t i3d_dim;
  size_t tsf_dim;
  size_t anomalous_segments_per_video;
  double signal_shift;
} milvad_synth_config;

MILVAD_API void milvad_synth_config_init(milvad_synth_config* config);
/* `masks_path` may be NULL. */
MILVAD_API milvad_status milvad_synth_write(const milvad_synth_config* config,
                                            const char* bags_path, const char* masks_path);
MILVAD_API milvad_status milvad_synth_oracle_auc(const milvad_synth_config* config, size_t k,
                                                 double* auc);

/* ---- Scoring head ------------------------------------------------------ */

typedef struct milvad_model milvad_model;

MILVAD_API milvad_status milvad_model_load(const char* path, milvad_model** out);
MILVAD_API milvad_status milvad_model_save(const milvad_model* model, const char* path);
MILVAD_API void milvad_model_destroy(milvad_model* model);
MILVAD_API size_t milvad_model_input_dim(const milvad_model* model);

typedef struct milvad_train_config {
  size_t k;
  size_t epochs;
  size_t batch_pairs;
  double learning_rate;
  double moment_decay_1;
  double moment_decay_2;
  double epsilon;
  uint64_t seed;
  size_t hidden_sizes[3];
  double leaky_slope;
} milvad_train_config;

typedef void (*milvad_epoch_callback)(size_t epoch, double mean_loss, int has_val_auc,
                                      double val_auc, void* user_data);

MILVAD_API void milvad_train_config_init(milvad_train_config* config);
/* `val` and `on_epoch` may be NULL. */
MILVAD_API milvad_status milvad_train(const milvad_bagset* train, const milvad_bagset* val,
                                      const milvad_train_config* config,
                                      milvad_epoch_callback on_epoch, void* user_data,
                                      milvad_model** out);

/* `segment_scores` may be NULL; otherwise it receives num_segments entries. */
MILVAD_API milvad_status milvad_score_video(const milvad_model* model, const milvad_bagset* bags,
                                            size_t index, size_t k, double* probability,
                                            double* segment_scores);

/* ---- Evaluation -------------------------------------------------------- */

typedef struct milvad_eval_report milvad_eval_report;

MILVAD_API milvad_status milvad_evaluate(const milvad_model* model, const milvad_bagset* bags,
                                         size_t k, milvad_eval_report** out);
MILVAD_API void milvad_eval_report_destroy(milvad_eval_report* report);
MILVAD_API double milvad_eval_report_auc(const milvad_eval_report* report);
MILVAD_API size_t milvad_eval_report_size(const milvad_eval_report* report);
MILVAD_API milvad_status milvad_eval_report_row(const milvad_eval_report* report, size_t row,
                                                const char** video_id, int* label,
                                                double* probability);
/* "video_id,label,probability" rows (descending probability), then "AUC,<v>". */
MILVAD_API milvad_status milvad_eval_report_csv(const milvad_eval_report* report, char** text);

MILVAD_API milvad_status milvad_roc_auc(const double* scores, const int* labels, size_t count,
                                        double* auc);

#ifdef __cplusplus
}
#endif

#endif /* MILVAD_H */

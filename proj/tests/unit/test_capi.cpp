// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "milvad/milvad.h"
#include "test_support.hpp"

using milvad::testing::TempDir;

namespace {

milvad_synth_config small_synth(std::uint32_t stream) {
  milvad_synth_config c;
  milvad_synth_config_init(&c);
  c.stream = stream;
  c.num_normal = 12;
  c.num_anomalous = 12;
  c.num_segments = 8;
  c.i3d_dim = 4;
  c.tsf_dim = 6;
  return c;
}

milvad_train_config small_train() {
  milvad_train_config c;
  milvad_train_config_init(&c);
  c.epochs = 3;
  c.hidden_sizes[0] = 8;
  c.hidden_sizes[1] = 4;
  c.hidden_sizes[2] = 4;
  return c;
}

struct Epochs {
  std::vector<double> losses;
  int with_val = 0;
};

void record_epoch(size_t, double loss, int has_val, double, void* user) {
  auto* e = static_cast<Epochs*>(user);
  e->losses.push_back(loss);
  e->with_val += has_val;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(milvad_version()) == "0.1.0");
  CHECK(std::string(milvad_status_name(MILVAD_OK)) == "ok");
  CHECK(std::string(milvad_status_name(MILVAD_ERR_HEADER_CHECKSUM)).size() > 0);
  CHECK(std::string(milvad_status_name(static_cast<milvad_status>(99))).size() > 0);
  milvad_string_free(nullptr);
}

TEST_CASE("plans") {
  milvad_plan* plan = nullptr;
  REQUIRE(milvad_plan_create(33, 32, 16, &plan) == MILVAD_OK);
  CHECK(milvad_plan_num_segments(plan) == 32);
  CHECK(milvad_plan_frames_per_segment(plan) == 16);
  std::int64_t start = -1, end = -1;
  std::vector<std::int64_t> idx(16);
  REQUIRE(milvad_plan_segment(plan, 31, &start, &end, idx.data()) == MILVAD_OK);
  CHECK(start == 31);
  CHECK(end == 33);
  CHECK(idx.front() == 31);
  CHECK(idx.back() == 32);
  CHECK(milvad_plan_segment(plan, 0, &start, &end, nullptr) == MILVAD_OK);
  CHECK(milvad_plan_segment(plan, 32, &start, &end, nullptr) == MILVAD_ERR_INVALID_ARGUMENT);
  milvad_plan_destroy(plan);
  milvad_plan_destroy(nullptr);

  milvad_plan* bad = nullptr;
  CHECK(milvad_plan_create(0, 32, 16, &bad) == MILVAD_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(std::strlen(milvad_last_error()) > 0);
  CHECK(milvad_plan_create(10, 32, 16, nullptr) == MILVAD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("synth, load, inspect") {
  TempDir dir;
  const std::string bags_path = dir.file("train.bin").string();
  const std::string masks_path = dir.file("masks.txt").string();
  const auto cfg = small_synth(0);
  REQUIRE(milvad_synth_write(&cfg, bags_path.c_str(), masks_path.c_str()) == MILVAD_OK);
  CHECK(milvad_synth_write(nullptr, bags_path.c_str(), nullptr) == MILVAD_ERR_INVALID_ARGUMENT);

  std::ifstream masks(masks_path);
  std::string line;
  int lines = 0;
  while (std::getline(masks, line)) ++lines;
  CHECK(lines == 12);

  milvad_bagset* bags = nullptr;
  REQUIRE(milvad_bagset_load(bags_path.c_str(), &bags) == MILVAD_OK);
  CHECK(milvad_bagset_size(bags) == 24);
  CHECK(milvad_bagset_num_segments(bags) == 8);
  CHECK(milvad_bagset_fused_dim(bags) == 10);
  CHECK(std::string(milvad_bagset_video_id(bags, 0)) == "s0_n0000");
  CHECK(milvad_bagset_label(bags, 0) == 0);
  CHECK(milvad_bagset_label(bags, 23) == 1);
  CHECK(milvad_bagset_video_id(bags, 24) == nullptr);
  CHECK(milvad_bagset_label(bags, 24) == -1);
  milvad_bagset_destroy(bags);

  char* text = nullptr;
  REQUIRE(milvad_inspect(bags_path.c_str(), &text) == MILVAD_OK);
  CHECK(std::string(text).rfind("24 videos, labels: 12/12\n", 0) == 0);
  milvad_string_free(text);

  milvad_bagset* missing = nullptr;
  CHECK(milvad_bagset_load(dir.file("nope.bin").string().c_str(), &missing) == MILVAD_ERR_IO);
  CHECK(missing == nullptr);

  {
    std::fstream f(bags_path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
  }
  text = nullptr;
  CHECK(milvad_inspect(bags_path.c_str(), &text) == MILVAD_ERR_BAD_MAGIC);
  CHECK(text == nullptr);
  CHECK(milvad_bagset_load(bags_path.c_str(), &missing) == MILVAD_ERR_BAD_MAGIC);

  double auc = 0.0;
  REQUIRE(milvad_synth_oracle_auc(&cfg, 3, &auc) == MILVAD_OK);
  CHECK(auc >= 0.99);
  CHECK(milvad_synth_oracle_auc(&cfg, 3, nullptr) == MILVAD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("train, save, load, score, evaluate") {
  TempDir dir;
  const std::string train_path = dir.file("train.bin").string();
  const std::string val_path = dir.file("val.bin").string();
  const auto train_cfg = small_synth(0);
  const auto val_cfg = small_synth(1);
  REQUIRE(milvad_synth_write(&train_cfg, train_path.c_str(), nullptr) == MILVAD_OK);
  REQUIRE(milvad_synth_write(&val_cfg, val_path.c_str(), nullptr) == MILVAD_OK);
  milvad_bagset* train = nullptr;
  milvad_bagset* val = nullptr;
  REQUIRE(milvad_bagset_load(train_path.c_str(), &train) == MILVAD_OK);
  REQUIRE(milvad_bagset_load(val_path.c_str(), &val) == MILVAD_OK);

  const auto tc = small_train();
  Epochs epochs;
  milvad_model* model = nullptr;
  REQUIRE(milvad_train(train, val, &tc, record_epoch, &epochs, &model) == MILVAD_OK);
  CHECK(epochs.losses.size() == 3);
  CHECK(epochs.with_val == 3);
  CHECK(milvad_model_input_dim(model) == 10);

  milvad_model* no_callback = nullptr;
  REQUIRE(milvad_train(train, nullptr, &tc, nullptr, nullptr, &no_callback) == MILVAD_OK);
  milvad_model_destroy(no_callback);

  auto bad_tc = tc;
  bad_tc.k = 0;
  milvad_model* none = nullptr;
  CHECK(milvad_train(train, nullptr, &bad_tc, nullptr, nullptr, &none) == MILVAD_ERR_INVALID_ARGUMENT);
  CHECK(none == nullptr);
  CHECK(milvad_train(nullptr, nullptr, &tc, nullptr, nullptr, &none) == MILVAD_ERR_INVALID_ARGUMENT);

  const std::string ckpt = dir.file("head.ckpt").string();
  REQUIRE(milvad_model_save(model, ckpt.c_str()) == MILVAD_OK);
  milvad_model* loaded = nullptr;
  REQUIRE(milvad_model_load(ckpt.c_str(), &loaded) == MILVAD_OK);
  CHECK(milvad_model_input_dim(loaded) == 10);

  double p = 0.0;
  std::vector<double> seg(8);
  REQUIRE(milvad_score_video(loaded, val, 0, 3, &p, seg.data()) == MILVAD_OK);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  for (double s : seg) CHECK(std::isfinite(s));
  CHECK(milvad_score_video(loaded, val, 0, 3, &p, nullptr) == MILVAD_OK);
  CHECK(milvad_score_video(loaded, val, 99, 3, &p, nullptr) == MILVAD_ERR_INVALID_ARGUMENT);
  CHECK(milvad_score_video(loaded, val, 0, 9, &p, nullptr) == MILVAD_ERR_INVALID_ARGUMENT);

  milvad_eval_report* report = nullptr;
  REQUIRE(milvad_evaluate(loaded, val, 3, &report) == MILVAD_OK);
  CHECK(milvad_eval_report_size(report) == 24);
  const double auc = milvad_eval_report_auc(report);
  CHECK(auc >= 0.0);
  CHECK(auc <= 1.0);
  const char* id = nullptr;
  int label = -1;
  double prob = -1.0, prev = 2.0;
  for (size_t r = 0; r < 24; ++r) {
    REQUIRE(milvad_eval_report_row(report, r, &id, &label, &prob) == MILVAD_OK);
    CHECK(prob <= prev);
    prev = prob;
  }
  CHECK(milvad_eval_report_row(report, 24, &id, &label, &prob) == MILVAD_ERR_INVALID_ARGUMENT);
  char* csv = nullptr;
  REQUIRE(milvad_eval_report_csv(report, &csv) == MILVAD_OK);
  const std::string text(csv);
  milvad_string_free(csv);
  CHECK(text.find("\nAUC,") != std::string::npos);
  CHECK(text.back() == '\n');
  milvad_eval_report_destroy(report);
  milvad_eval_report_destroy(nullptr);

  // Different input width than the head expects.
  milvad_synth_config wide = small_synth(0);
  wide.tsf_dim = 7;
  const std::string wide_path = dir.file("wide.bin").string();
  REQUIRE(milvad_synth_write(&wide, wide_path.c_str(), nullptr) == MILVAD_OK);
  milvad_bagset* wide_bags = nullptr;
  REQUIRE(milvad_bagset_load(wide_path.c_str(), &wide_bags) == MILVAD_OK);
  CHECK(milvad_evaluate(loaded, wide_bags, 3, &report) == MILVAD_ERR_INVALID_ARGUMENT);
  milvad_bagset_destroy(wide_bags);

  std::ofstream(dir.file("junk.ckpt"), std::ios::binary) << "not a checkpoint at all, just text";
  milvad_model* junk = nullptr;
  CHECK(milvad_model_load(dir.file("junk.ckpt").string().c_str(), &junk) == MILVAD_ERR_BAD_MAGIC);

  milvad_model_destroy(model);
  milvad_model_destroy(loaded);
  milvad_model_destroy(nullptr);
  milvad_bagset_destroy(train);
  milvad_bagset_destroy(val);
}

TEST_CASE("roc_auc") {
  const double scores[] = {0.9, 0.4, 0.6, 0.1};
  const int labels[] = {1, 1, 0, 0};
  double auc = 0.0;
  REQUIRE(milvad_roc_auc(scores, labels, 4, &auc) == MILVAD_OK);
  CHECK(auc == 0.75);
  const int one_class[] = {1, 1, 1, 1};
  CHECK(milvad_roc_auc(scores, one_class, 4, &auc) == MILVAD_ERR_INVALID_ARGUMENT);
  CHECK(milvad_roc_auc(nullptr, labels, 4, &auc) == MILVAD_ERR_INVALID_ARGUMENT);
}

// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "milvad/fusion.hpp"
#include "milvad/mil_head.hpp"
#include "milvad/pooling_loss.hpp"

namespace milvad {

struct TrainConfig {
  std::size_t k = kDefaultTopK;
  std::size_t epochs = 50;
  std::size_t batch_pairs = 8;  // normal/anomalous pairs per batch
  double learning_rate = 1e-3;
  double moment_decay_1 = 0.9;
  double moment_decay_2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  std::array<std::size_t, 3> hidden_sizes = kDefaultHiddenSizes;
  double leaky_slope = kDefaultLeakySlope;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::optional<double> val_auc;
};

struct TrainRunRecord {
  TrainConfig config;
  std::vector<EpochStats> history;  // one entry per epoch
  HeadParameters params;
};

struct VideoScore {
  double logit = 0.0;
  double probability = 0.5;
  Eigen::VectorXd segment_scores;
  std::vector<std::size_t> selected;
};

/// head_forward, then top-k pooling, then the sigmoid.
VideoScore score_video(const FusedBag& bag, const HeadParameters& params, std::size_t k);

struct VideoGradient {
  double loss = 0.0;
  HeadGradients grads;
};

/// BCE of one video's pooled logit and its gradient w.r.t. every parameter.
VideoGradient video_loss_gradient(const FusedBag& bag, const HeadParameters& params, std::size_t k,
                                  bool input_gradient = false);

/// Adaptive-moment optimizer with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(const HeadParameters& shape, double learning_rate, double beta1, double beta2,
                double epsilon);

  void step(HeadParameters& params, const HeadGradients& grads);
  std::size_t steps() const { return steps_; }

 private:
  HeadGradients first_;
  HeadGradients second_;
  double learning_rate_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t steps_ = 0;
};

/// Visiting order of `count` items in a given epoch; a pure function of
/// (seed, epoch, stream).
std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed, std::size_t epoch,
                                     std::uint32_t stream);

using EpochCallback = std::function<void(const EpochStats&)>;

/// Balanced mini-batch training. Every epoch walks max(#normal, #anomalous)
/// pairs; the smaller class is cycled. Throws Error(kInvalidArgument) for a
/// single-class training set and Error(kNumeric) naming the video when a
/// loss becomes non-finite.
TrainRunRecord train(std::span<const FusedBag> train_bags, std::span<const FusedBag> val_bags,
                     const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace milvad

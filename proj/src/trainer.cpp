// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "milvad/error.hpp"
#include "milvad/eval.hpp"

namespace milvad {
namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void add_scaled(HeadGradients& acc, const HeadGradients& g, double scale) {
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    acc.weight[l] += scale * g.weight[l];
    acc.bias[l] += scale * g.bias[l];
  }
}

void check_bags(std::span<const FusedBag> bags, const HeadParameters& params, std::size_t k,
                const char* which) {
  for (const auto& bag : bags) {
    if (bag.width() != params.input_dim()) {
      throw_invalid(std::string(which) + " video '" + bag.video_id + "' has width " +
                    std::to_string(bag.width()) + ", expected " + std::to_string(params.input_dim()));
    }
    if (k > bag.num_segments()) {
      throw_invalid("k = " + std::to_string(k) + " exceeds the " + std::to_string(bag.num_segments()) +
                    " segments of " + which + " video '" + bag.video_id + "'");
    }
  }
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const FusedBag> bags) {
  std::size_t normal = 0;
  for (const auto& bag : bags) normal += bag.label == 0 ? 1 : 0;
  return {normal, bags.size() - normal};
}

}  // namespace

void TrainConfig::validate() const {
  if (k < 1) throw_invalid("k must be >= 1");
  if (epochs < 1) throw_invalid("epochs must be >= 1");
  if (batch_pairs < 1) throw_invalid("batch_pairs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw_invalid("learning rate must be finite and non-negative");
  }
  if (!(moment_decay_1 > 0.0 && moment_decay_1 < 1.0)) throw_invalid("moment_decay_1 must lie in (0, 1)");
  if (!(moment_decay_2 > 0.0 && moment_decay_2 < 1.0)) throw_invalid("moment_decay_2 must lie in (0, 1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw_invalid("epsilon must be positive");
  for (std::size_t h : hidden_sizes) {
    if (h < 1) throw_invalid("hidden sizes must be positive");
  }
  if (!std::isfinite(leaky_slope)) throw_invalid("leaky slope must be finite");
}

VideoScore score_video(const FusedBag& bag, const HeadParameters& params, std::size_t k) {
  HeadOutput out = head_forward(bag.features, params);
  PoolResult pooled = topk_pool(as_span(out.scores), k);
  VideoScore score;
  score.logit = pooled.logit;
  score.probability = pooled.probability;
  score.segment_scores = std::move(out.scores);
  score.selected = std::move(pooled.selected);
  return score;
}

VideoGradient video_loss_gradient(const FusedBag& bag, const HeadParameters& params, std::size_t k,
                                  bool input_gradient) {
  const HeadOutput out = head_forward(bag.features, params);
  if (!out.scores.allFinite()) {
    throw Error(ErrorCode::kNumeric, "non-finite segment scores on video '" + bag.video_id + "'");
  }
  const auto scores = as_span(out.scores);
  const PoolResult pooled = topk_pool(scores, k);
  const LossResult loss = bce_from_logit(pooled.logit, bag.label);

  const std::vector<double> dpool = pool_backward(scores, k);
  Eigen::VectorXd dscore(out.scores.size());
  for (Eigen::Index i = 0; i < dscore.size(); ++i) {
    dscore(i) = loss.dlogit * dpool[static_cast<std::size_t>(i)];
  }

  VideoGradient result;
  result.loss = loss.loss;
  result.grads = head_backward(out.cache, params, dscore, input_gradient);
  return result;
}

AdamOptimizer::AdamOptimizer(const HeadParameters& shape, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : first_(HeadGradients::zeros_like(shape)),
      second_(HeadGradients::zeros_like(shape)),
      learning_rate_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {}

void AdamOptimizer::step(HeadParameters& params, const HeadGradients& grads) {
  ++steps_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));

  const auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    theta.array() -= learning_rate_ * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + epsilon_);
  };
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    update(params.layers[l].weight, grads.weight[l], first_.weight[l], second_.weight[l]);
    update(params.layers[l].bias, grads.bias[l], first_.bias[l], second_.bias[l]);
  }
}

std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed, std::size_t epoch,
                                     std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32),
                    stream};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

TrainRunRecord train(std::span<const FusedBag> train_bags, std::span<const FusedBag> val_bags,
                     const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_bags.empty()) throw_invalid("training set is empty");
  const auto [normal_count, anomalous_count] = class_counts(train_bags);
  if (normal_count == 0 || anomalous_count == 0) {
    throw_invalid("training set must contain both normal and anomalous videos (got " +
                  std::to_string(normal_count) + " normal, " + std::to_string(anomalous_count) +
                  " anomalous)");
  }
  if (!val_bags.empty()) {
    const auto [val_normal, val_anomalous] = class_counts(val_bags);
    if (val_normal == 0 || val_anomalous == 0) {
      throw_invalid("validation set must contain both normal and anomalous videos");
    }
  }

  TrainRunRecord record;
  record.config = config;
  record.params = HeadParameters::initialize(train_bags.front().width(), config.hidden_sizes,
                                             config.leaky_slope, config.seed);
  check_bags(train_bags, record.params, config.k, "training");
  check_bags(val_bags, record.params, config.k, "validation");

  std::vector<std::size_t> normals;
  std::vector<std::size_t> anomalies;
  for (std::size_t i = 0; i < train_bags.size(); ++i) {
    (train_bags[i].label == 0 ? normals : anomalies).push_back(i);
  }
  const std::size_t pairs = std::max(normals.size(), anomalies.size());

  AdamOptimizer optimizer(record.params, config.learning_rate, config.moment_decay_1,
                          config.moment_decay_2, config.epsilon);
  HeadGradients batch_grad = HeadGradients::zeros_like(record.params);
  std::vector<std::size_t> batch;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto normal_order = epoch_order(normals.size(), config.seed, epoch, 0);
    const auto anomalous_order = epoch_order(anomalies.size(), config.seed, epoch, 1);

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t first_pair = 0; first_pair < pairs; first_pair += config.batch_pairs) {
      const std::size_t last_pair = std::min(pairs, first_pair + config.batch_pairs);
      batch.clear();
      for (std::size_t p = first_pair; p < last_pair; ++p) {
        batch.push_back(normals[normal_order[p % normals.size()]]);
        batch.push_back(anomalies[anomalous_order[p % anomalies.size()]]);
      }

      for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
        batch_grad.weight[l].setZero();
        batch_grad.bias[l].setZero();
      }
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (std::size_t index : batch) {
        const FusedBag& bag = train_bags[index];
        const VideoGradient vg = video_loss_gradient(bag, record.params, config.k);
        if (!std::isfinite(vg.loss)) {
          throw Error(ErrorCode::kNumeric, "non-finite loss on video '" + bag.video_id +
                                               "' in epoch " + std::to_string(epoch));
        }
        loss_sum += vg.loss;
        ++loss_count;
        add_scaled(batch_grad, vg.grads, scale);
      }
      optimizer.step(record.params, batch_grad);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / static_cast<double>(loss_count);
    if (!val_bags.empty()) stats.val_auc = evaluate(val_bags, record.params, config.k).auc;
    record.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return record;
}

}  // namespace milvad

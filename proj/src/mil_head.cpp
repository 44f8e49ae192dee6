// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/mil_head.hpp"

#include <cmath>
#include <random>
#include <string>

#include "milvad/error.hpp"

namespace milvad {
namespace {

std::array<std::size_t, kNumHeadLayers + 1> layer_widths(std::size_t input_dim,
                                                         std::array<std::size_t, 3> hidden) {
  return {input_dim, hidden[0], hidden[1], hidden[2], 1};
}

void check_shape_args(std::size_t input_dim, std::array<std::size_t, 3> hidden, double slope) {
  if (input_dim == 0) throw_invalid("head input width must be positive");
  for (std::size_t h : hidden) {
    if (h == 0) throw_invalid("hidden sizes must be positive");
  }
  if (!std::isfinite(slope)) throw_invalid("leaky slope must be finite");
}

// Locates flat coordinate `index` as (layer, is_bias, offset).
struct CoordinateRef {
  std::size_t layer;
  bool is_bias;
  Eigen::Index row;
  Eigen::Index col;
};

template <typename WeightAt>
CoordinateRef locate(std::size_t index, std::size_t total, WeightAt&& weight_shape) {
  if (index >= total) {
    throw_invalid("parameter coordinate " + std::to_string(index) + " out of range [0, " +
                  std::to_string(total) + ")");
  }
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    const auto [rows, cols] = weight_shape(l);
    const std::size_t weight_count = rows * cols;
    if (index < weight_count) {
      return {l, false, static_cast<Eigen::Index>(index / cols),
              static_cast<Eigen::Index>(index % cols)};
    }
    index -= weight_count;
    if (index < rows) return {l, true, static_cast<Eigen::Index>(index), 0};
    index -= rows;
  }
  throw Error(ErrorCode::kInternal, "coordinate lookup fell through");
}

void leaky_relu(const Eigen::MatrixXd& pre, double slope, Eigen::MatrixXd& act) {
  act = pre.unaryExpr([slope](double x) { return x >= 0.0 ? x : slope * x; });
}

}  // namespace

HeadParameters HeadParameters::zeros(std::size_t input_dim, std::array<std::size_t, 3> hidden,
                                     double leaky_slope) {
  check_shape_args(input_dim, hidden, leaky_slope);
  const auto widths = layer_widths(input_dim, hidden);
  HeadParameters params;
  params.leaky_slope = leaky_slope;
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    const auto in = static_cast<Eigen::Index>(widths[l]);
    const auto out = static_cast<Eigen::Index>(widths[l + 1]);
    params.layers[l].weight = Eigen::MatrixXd::Zero(out, in);
    params.layers[l].bias = Eigen::VectorXd::Zero(out);
  }
  return params;
}

HeadParameters HeadParameters::initialize(std::size_t input_dim,
                                          std::array<std::size_t, 3> hidden,
                                          double leaky_slope, std::uint64_t seed) {
  HeadParameters params = zeros(input_dim, hidden, leaky_slope);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x68656164u};
  std::mt19937_64 rng(seq);
  for (auto& layer : params.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
    }
  }
  return params;
}

std::array<std::size_t, 3> HeadParameters::hidden_sizes() const {
  return {static_cast<std::size_t>(layers[0].weight.rows()),
          static_cast<std::size_t>(layers[1].weight.rows()),
          static_cast<std::size_t>(layers[2].weight.rows())};
}

std::size_t HeadParameters::num_parameters() const {
  std::size_t total = 0;
  for (const auto& layer : layers) {
    total += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return total;
}

double& HeadParameters::coordinate(std::size_t index) {
  const auto ref = locate(index, num_parameters(), [this](std::size_t l) {
    return std::pair<std::size_t, std::size_t>(layers[l].weight.rows(), layers[l].weight.cols());
  });
  auto& layer = layers[ref.layer];
  return ref.is_bias ? layer.bias(ref.row) : layer.weight(ref.row, ref.col);
}

double HeadParameters::coordinate(std::size_t index) const {
  return const_cast<HeadParameters*>(this)->coordinate(index);
}

void HeadParameters::validate() const {
  if (!std::isfinite(leaky_slope)) throw_invalid("leaky slope must be finite");
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    const auto& layer = layers[l];
    if (layer.weight.rows() == 0 || layer.weight.cols() == 0) {
      throw_invalid("layer " + std::to_string(l + 1) + " has an empty weight matrix");
    }
    if (layer.bias.size() != layer.weight.rows()) {
      throw_invalid("layer " + std::to_string(l + 1) + " bias length does not match its output width");
    }
    if (l > 0 && layer.weight.cols() != layers[l - 1].weight.rows()) {
      throw_invalid("layer " + std::to_string(l + 1) + " input width does not chain from layer " +
                    std::to_string(l));
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw_invalid("layer " + std::to_string(l + 1) + " has non-finite parameters");
    }
  }
  if (layers[kNumHeadLayers - 1].weight.rows() != 1) throw_invalid("final layer must output a scalar");
}

HeadGradients HeadGradients::zeros_like(const HeadParameters& params) {
  HeadGradients grads;
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    grads.weight[l] = Eigen::MatrixXd::Zero(params.layers[l].weight.rows(),
                                            params.layers[l].weight.cols());
    grads.bias[l] = Eigen::VectorXd::Zero(params.layers[l].bias.size());
  }
  return grads;
}

std::size_t HeadGradients::num_parameters() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    total += static_cast<std::size_t>(weight[l].size() + bias[l].size());
  }
  return total;
}

double HeadGradients::coordinate(std::size_t index) const {
  const auto ref = locate(index, num_parameters(), [this](std::size_t l) {
    return std::pair<std::size_t, std::size_t>(weight[l].rows(), weight[l].cols());
  });
  return ref.is_bias ? bias[ref.layer](ref.row) : weight[ref.layer](ref.row, ref.col);
}

HeadOutput head_forward(const Eigen::MatrixXd& features, const HeadParameters& params) {
  if (static_cast<std::size_t>(features.cols()) != params.input_dim()) {
    throw_invalid("feature width " + std::to_string(features.cols()) +
                  " does not match head input width " + std::to_string(params.input_dim()));
  }
  if (features.rows() == 0) throw_invalid("head_forward: no segments");

  HeadOutput out;
  ForwardCache& cache = out.cache;
  cache.input = features;
  const Eigen::MatrixXd* prev = &cache.input;
  for (std::size_t l = 0; l + 1 < kNumHeadLayers; ++l) {
    const auto& layer = params.layers[l];
    cache.pre[l].noalias() = *prev * layer.weight.transpose();
    cache.pre[l].rowwise() += layer.bias.transpose();
    leaky_relu(cache.pre[l], params.leaky_slope, cache.act[l]);
    prev = &cache.act[l];
  }
  const auto& last = params.layers[kNumHeadLayers - 1];
  out.scores.noalias() = *prev * last.weight.row(0).transpose();
  out.scores.array() += last.bias(0);
  return out;
}

HeadGradients head_backward(const ForwardCache& cache, const HeadParameters& params,
                            const Eigen::VectorXd& dscore, bool input_gradient) {
  const Eigen::Index n = cache.input.rows();
  if (dscore.size() != n) {
    throw_invalid("dscore length " + std::to_string(dscore.size()) + " does not match " +
                  std::to_string(n) + " segments");
  }
  if (static_cast<std::size_t>(cache.input.cols()) != params.input_dim()) {
    throw_invalid("forward cache does not match head parameters");
  }
  for (std::size_t l = 0; l + 1 < kNumHeadLayers; ++l) {
    if (cache.pre[l].rows() != n || cache.pre[l].cols() != params.layers[l].weight.rows()) {
      throw_invalid("forward cache does not match head parameters");
    }
  }

  HeadGradients grads;
  const double slope = params.leaky_slope;

  // Layer 4 has no activation: dZ4 = dscore.
  const std::size_t top = kNumHeadLayers - 1;
  grads.weight[top] = dscore.transpose() * cache.act[top - 1];
  grads.bias[top] = Eigen::VectorXd::Constant(1, dscore.sum());
  Eigen::MatrixXd delta = dscore * params.layers[top].weight;  // dA3, N x h3

  for (std::size_t l = top; l-- > 0;) {
    // dZ_l = dA_l * LeakyReLU'(Z_l)
    delta.array() *= cache.pre[l].array().unaryExpr(
        [slope](double x) { return x > 0.0 ? 1.0 : slope; });
    const Eigen::MatrixXd& below = l == 0 ? cache.input : cache.act[l - 1];
    grads.weight[l].noalias() = delta.transpose() * below;
    grads.bias[l] = delta.colwise().sum().transpose();
    if (l > 0 || input_gradient) {
      Eigen::MatrixXd next = delta * params.layers[l].weight;
      delta = std::move(next);
    }
  }
  if (input_gradient) grads.features = std::move(delta);
  return grads;
}

}  // namespace milvad

// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

// Segment scoring head: four dense layers with LeakyReLU between them,
// mapping each fused segment vector to one raw anomaly logit. Segments are
// rows; every pass handles all segments of a video at once.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace milvad {

inline constexpr std::array<std::size_t, 3> kDefaultHiddenSizes = {512, 128, 32};
inline constexpr double kDefaultLeakySlope = 0.01;
inline constexpr std::size_t kNumHeadLayers = 4;

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct HeadParameters {
  std::array<DenseLayer, kNumHeadLayers> layers;
  double leaky_slope = kDefaultLeakySlope;

  /// All-zero parameters of the given shape.
  static HeadParameters zeros(std::size_t input_dim,
                              std::array<std::size_t, 3> hidden = kDefaultHiddenSizes,
                              double leaky_slope = kDefaultLeakySlope);

  /// Weights uniform in [-sqrt(6/fan_in), +sqrt(6/fan_in)], biases zero.
  static HeadParameters initialize(std::size_t input_dim, std::array<std::size_t, 3> hidden,
                                   double leaky_slope, std::uint64_t seed);

  std::size_t input_dim() const { return static_cast<std::size_t>(layers[0].weight.cols()); }
  std::array<std::size_t, 3> hidden_sizes() const;

  /// Flat view used by gradient checks and the optimizer: layer by layer,
  /// weight entries row-major, then the bias.
  std::size_t num_parameters() const;
  double& coordinate(std::size_t index);
  double coordinate(std::size_t index) const;

  /// Throws Error(kInvalidArgument) if shapes do not chain D -> h1 -> h2 ->
  /// h3 -> 1 or any entry is non-finite.
  void validate() const;
};

struct ForwardCache {
  Eigen::MatrixXd input;                               // N x D
  std::array<Eigen::MatrixXd, kNumHeadLayers - 1> pre;  // N x h_l, before LeakyReLU
  std::array<Eigen::MatrixXd, kNumHeadLayers - 1> act;  // N x h_l, after LeakyReLU
};

struct HeadOutput {
  Eigen::VectorXd scores;  // N raw segment logits
  ForwardCache cache;
};

struct HeadGradients {
  std::array<Eigen::MatrixXd, kNumHeadLayers> weight;
  std::array<Eigen::VectorXd, kNumHeadLayers> bias;
  Eigen::MatrixXd features;  // N x D; empty when not requested

  static HeadGradients zeros_like(const HeadParameters& params);

  /// Same flat ordering as HeadParameters::coordinate.
  double coordinate(std::size_t index) const;
  std::size_t num_parameters() const;
};

HeadOutput head_forward(const Eigen::MatrixXd& features, const HeadParameters& params);

/// Exact gradients of sum_i dscore[i] * scores[i]. The LeakyReLU derivative
/// at exactly zero is taken as the slope.
HeadGradients head_backward(const ForwardCache& cache, const HeadParameters& params,
                            const Eigen::VectorXd& dscore, bool input_gradient = true);

}  // namespace milvad

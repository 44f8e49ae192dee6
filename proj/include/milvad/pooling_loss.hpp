// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace milvad {

inline constexpr std::size_t kDefaultTopK = 3;

struct PoolResult {
  double logit = 0.0;                     // mean of the selected scores
  std::vector<std::size_t> selected;      // ascending segment indices
  double probability = 0.5;               // sigmoid(logit)
};

struct LossResult {
  double loss = 0.0;
  double dlogit = 0.0;
};

double sigmoid(double z);

/// Averages the k largest scores. Ties are broken toward the lower segment
/// index. The sum runs over selected indices in ascending order and the mean
/// is clamped to [min, max] of the selection so rounding never leaves it.
PoolResult topk_pool(std::span<const double> scores, std::size_t k);

/// Subgradient of the pooled logit: 1/k on the selected indices, 0 elsewhere.
std::vector<double> pool_backward(std::span<const double> scores, std::size_t k);

/// Binary cross-entropy on the logit: max(z,0) - y*z + log1p(exp(-|z|)),
/// with derivative sigmoid(z) - y.
LossResult bce_from_logit(double z, int y);

}  // namespace milvad

// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/pooling_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "milvad/error.hpp"

namespace milvad {
namespace {

std::vector<std::size_t> select_topk(std::span<const double> scores, std::size_t k) {
  if (scores.empty()) throw_invalid("topk_pool: no scores");
  if (k < 1 || k > scores.size()) {
    throw_invalid("k must lie in [1, " + std::to_string(scores.size()) + "], got " + std::to_string(k));
  }
  for (double s : scores) {
    if (std::isnan(s)) throw_invalid("topk_pool: NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto ranks_before = [&scores](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(),
                   ranks_before);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

PoolResult topk_pool(std::span<const double> scores, std::size_t k) {
  PoolResult result;
  result.selected = select_topk(scores, k);

  double sum = 0.0;
  double lo = scores[result.selected.front()];
  double hi = lo;
  for (std::size_t i : result.selected) {
    sum += scores[i];
    lo = std::min(lo, scores[i]);
    hi = std::max(hi, scores[i]);
  }
  result.logit = std::clamp(sum / static_cast<double>(k), lo, hi);
  result.probability = sigmoid(result.logit);
  return result;
}

std::vector<double> pool_backward(std::span<const double> scores, std::size_t k) {
  const auto selected = select_topk(scores, k);
  std::vector<double> grad(scores.size(), 0.0);
  const double weight = 1.0 / static_cast<double>(k);
  for (std::size_t i : selected) grad[i] = weight;
  return grad;
}

LossResult bce_from_logit(double z, int y) {
  if (!std::isfinite(z)) throw_invalid("bce_from_logit: non-finite logit");
  if (y != 0 && y != 1) throw_invalid("bce_from_logit: label must be 0 or 1");
  LossResult r;
  r.loss = std::max(z, 0.0) - static_cast<double>(y) * z + std::log1p(std::exp(-std::abs(z)));
  r.dlogit = sigmoid(z) - static_cast<double>(y);
  return r;
}

}  // namespace milvad

// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>

#include "milvad/error.hpp"
#include "milvad/trainer.hpp"

namespace milvad {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw_invalid("roc_auc: scores and labels differ in length");
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw_invalid("roc_auc: labels must be 0 or 1");
    if (std::isnan(scores[i])) throw_invalid("roc_auc: NaN score");
    positives += static_cast<std::uint64_t>(labels[i]);
  }
  const std::uint64_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw_invalid("roc_auc needs at least one positive and one negative label");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the Mann-Whitney U statistic, walking groups of tied scores upward.
  std::uint64_t twice_u = 0;
  std::uint64_t negatives_below = 0;
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin;
    std::uint64_t group_pos = 0;
    std::uint64_t group_neg = 0;
    while (end < order.size() && scores[order[end]] == scores[order[begin]]) {
      (labels[order[end]] == 1 ? group_pos : group_neg)++;
      ++end;
    }
    twice_u += 2 * group_pos * negatives_below + group_pos * group_neg;
    negatives_below += group_neg;
    begin = end;
  }
  return static_cast<double>(twice_u) / static_cast<double>(2 * positives * negatives);
}

std::string EvalReport::to_csv() const {
  std::string out;
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, ",%d,%.6f\n", row.label, row.probability);
    out += row.video_id;
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "AUC,%.6f\n", auc);
  out += buf;
  return out;
}

EvalReport evaluate(std::span<const FusedBag> bags, const HeadParameters& params, std::size_t k) {
  EvalReport report;
  report.video_count = bags.size();
  // Ranked on the logit: same ordering as the probability, without sigmoid
  // saturation creating artificial ties.
  std::vector<double> logits;
  std::vector<int> labels;
  logits.reserve(bags.size());
  labels.reserve(bags.size());
  for (const auto& bag : bags) {
    const VideoScore scored = score_video(bag, params, k);
    logits.push_back(scored.logit);
    labels.push_back(bag.label);
    report.rows.push_back({bag.video_id, bag.label, scored.probability});
  }
  report.auc = roc_auc(logits, labels);
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const EvalRow& a, const EvalRow& b) { return a.probability > b.probability; });
  return report;
}

}  // namespace milvad

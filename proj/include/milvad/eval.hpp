// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "milvad/fusion.hpp"
#include "milvad/mil_head.hpp"

namespace milvad {

/// Mann-Whitney AUC: over all (positive, negative) pairs, a higher positive
/// score counts 1 and a tie 1/2. The pair count is accumulated in integers,
/// so the result is the exact ratio rounded once. Throws if either class is
/// missing or the lengths differ.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct EvalRow {
  std::string video_id;
  int label = 0;
  double probability = 0.5;
};

struct EvalReport {
  double auc = 0.5;
  std::size_t video_count = 0;
  std::vector<EvalRow> rows;  // descending probability, input order among ties

  /// "video_id,label,probability" rows followed by "AUC,<value>".
  std::string to_csv() const;
};

EvalReport evaluate(std::span<const FusedBag> bags, const HeadParameters& params, std::size_t k);

}  // namespace milvad

// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/fusion.hpp"

#include <cmath>

#include "milvad/error.hpp"

namespace milvad {
namespace {

// Writes the normalized copy of `src` into `dst` (same length).
template <typename T>
void normalize_into(std::span<const T> src, double* dst) {
  double sum_sq = 0.0;
  for (T x : src) {
    if (!std::isfinite(x)) throw_invalid("l2_normalize: non-finite input");
    sum_sq += static_cast<double>(x) * static_cast<double>(x);
  }
  const double norm = std::sqrt(sum_sq);
  const double scale = norm > kNormEpsilon ? 1.0 / norm : 1.0;
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<double>(src[i]) * scale;
}

}  // namespace

std::vector<double> l2_normalize(std::span<const double> v) {
  std::vector<double> out(v.size());
  normalize_into(v, out.data());
  return out;
}

FusedBag fuse_bag(const SegmentFeatureBag& bag) {
  check_bag(bag);
  FusedBag fused;
  fused.video_id = bag.video_id;
  fused.label = bag.label;
  fused.i3d_dim = bag.i3d_dim;
  fused.tsf_dim = bag.tsf_dim;

  // Row-major staging buffer, copied into the column-major matrix at the end.
  const std::size_t width = bag.i3d_dim + bag.tsf_dim;
  std::vector<double> row(width);
  fused.features.resize(static_cast<Eigen::Index>(bag.num_segments),
                        static_cast<Eigen::Index>(width));
  for (std::size_t s = 0; s < bag.num_segments; ++s) {
    normalize_into(bag.i3d_row(s), row.data());
    normalize_into(bag.tsf_row(s), row.data() + bag.i3d_dim);
    for (std::size_t c = 0; c < width; ++c) {
      fused.features(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  return fused;
}

std::vector<FusedBag> fuse_bags(std::span<const SegmentFeatureBag> bags) {
  std::vector<FusedBag> fused;
  fused.reserve(bags.size());
  for (const auto& bag : bags) fused.push_back(fuse_bag(bag));
  return fused;
}

}  // namespace milvad

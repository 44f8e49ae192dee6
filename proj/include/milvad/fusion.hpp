// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "milvad/feature_store.hpp"

namespace milvad {

inline constexpr double kNormEpsilon = 1e-12;

struct FusedBag {
  std::string video_id;
  int label = 0;
  std::size_t i3d_dim = 0;
  std::size_t tsf_dim = 0;
  Eigen::MatrixXd features;  // num_segments x (i3d_dim + tsf_dim)

  std::size_t num_segments() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t width() const { return static_cast<std::size_t>(features.cols()); }
};

/// v / ||v||_2, or v unchanged when ||v||_2 <= kNormEpsilon.
std::vector<double> l2_normalize(std::span<const double> v);

/// Row i = [normalize(i3d row i), normalize(tsf row i)].
FusedBag fuse_bag(const SegmentFeatureBag& bag);
std::vector<FusedBag> fuse_bags(std::span<const SegmentFeatureBag> bags);

}  // namespace milvad

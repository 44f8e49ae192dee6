// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded synthetic bags with known anomalous segments, plus reference
// scorers used to check what the trained pipeline learns.
//
// Every segment of every video is drawn from N(0, I) over the concatenated
// (i3d_dim + tsf_dim) features. In an anomalous video, a fixed number of
// segments are shifted by signal_shift * sqrt(D) * u, where u is a unit
// direction drawn once per seed. The shift therefore has RMS magnitude
// signal_shift per coordinate, i.e. it is expressed in units of the base
// standard deviation.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "milvad/feature_store.hpp"
#include "milvad/fusion.hpp"
#include "milvad/mil_head.hpp"

namespace milvad {

struct SynthConfig {
  std::uint64_t seed = 42;
  // Selects an independent sample draw that shares the planted direction of
  // `seed`; use distinct streams for train and test splits.
  std::uint32_t stream = 0;
  std::size_t num_normal = 100;
  std::size_t num_anomalous = 100;
  std::size_t num_segments = 32;
  std::size_t i3d_dim = 24;
  std::size_t tsf_dim = 40;
  std::size_t anomalous_segments_per_video = 3;
  double signal_shift = 1.5;

  void validate() const;
};

struct GroundTruthEntry {
  std::string video_id;
  std::vector<std::size_t> segments;  // ascending
};

struct GroundTruthMask {
  std::vector<GroundTruthEntry> entries;  // one per anomalous video, file order

  /// One line per anomalous video: "video_id idx idx idx".
  std::string to_text() const;
};

void write_masks(const std::filesystem::path& path, const GroundTruthMask& masks);

struct SynthDataset {
  std::vector<SegmentFeatureBag> bags;  // normal videos first, then anomalous
  GroundTruthMask masks;
};

SynthDataset generate(const SynthConfig& config);

/// Unit vector over the concatenated feature space; depends only on seed
/// and dims.
std::vector<double> planted_direction(const SynthConfig& config);

/// AUC of the reference scorer that ranks each video by the top-k mean of
/// its raw segments' projections onto the planted direction.
double oracle_auc(std::span<const SegmentFeatureBag> bags, const GroundTruthMask& masks,
                  const SynthConfig& config, std::size_t k = 3);

/// bce(topk_pool(head(bag)).logit, y) at `params`.
double composite_loss(const HeadParameters& params, const FusedBag& bag, std::size_t k, int y);

/// Central difference (L(theta + h e) - L(theta - h e)) / 2h along one
/// parameter coordinate.
double finite_diff_loss(const HeadParameters& params, const FusedBag& bag, std::size_t k, int y,
                        std::size_t coordinate, double h);

}  // namespace milvad

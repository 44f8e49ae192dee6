// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace milvad {

inline constexpr std::int64_t kDefaultNumSegments = 32;
inline constexpr std::int64_t kDefaultFramesPerSegment = 16;

struct VideoManifest {
  std::string video_id;
  std::int64_t frame_count = 0;
  int label = 0;  // 0 = normal, 1 = anomalous
};

/// Half-open frame range [start, end). May be empty when a video has fewer
/// frames than segments.
struct SegmentRange {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - start; }
  bool operator==(const SegmentRange&) const = default;
};

struct SamplingPlan {
  std::int64_t frame_count = 0;
  std::int64_t num_segments = 0;
  std::int64_t frames_per_segment = 0;
  std::vector<SegmentRange> segments;
  std::vector<std::vector<std::int64_t>> sampled_indices;

  bool operator==(const SamplingPlan&) const = default;
};

/// Segment i covers [floor(i*T/N), floor((i+1)*T/N)). Frame indices are
/// 0-based. Throws Error(kInvalidArgument) for non-positive arguments.
std::vector<SegmentRange> plan_segments(std::int64_t frame_count,
                                        std::int64_t num_segments);

/// Uniform sampling start + floor(j*L/F) when L >= F. Shorter segments are
/// padded by repeating their last frame; an empty segment repeats the
/// nearest preceding frame (frame 0 if it starts at 0).
std::vector<std::int64_t> sample_frames(const SegmentRange& segment,
                                        std::int64_t frames_per_segment);

SamplingPlan build_plan(const VideoManifest& manifest,
                        std::int64_t num_segments = kDefaultNumSegments,
                        std::int64_t frames_per_segment = kDefaultFramesPerSegment);

/// Checks manifest invariants (frame_count >= 1, binary label).
void validate_manifest(const VideoManifest& manifest);

}  // namespace milvad

// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/temporal_plan.hpp"

#include "milvad/error.hpp"

namespace milvad {
namespace {

// Counts (segments, frames per segment) are capped so the split below fits.
constexpr std::int64_t kMaxCount = std::int64_t{1} << 31;

// floor(a*b/c) for 0 <= a <= c <= kMaxCount and any non-negative b, split as
// a*(b/c) + a*(b%c)/c so no intermediate exceeds b or c*c.
std::int64_t mul_div_floor(std::int64_t a, std::int64_t b, std::int64_t c) {
  return a * (b / c) + (a * (b % c)) / c;
}

}  // namespace

std::vector<SegmentRange> plan_segments(std::int64_t frame_count,
                                        std::int64_t num_segments) {
  if (frame_count < 1) throw_invalid("frame_count must be >= 1, got " + std::to_string(frame_count));
  if (num_segments < 1) throw_invalid("num_segments must be >= 1, got " + std::to_string(num_segments));
  if (num_segments > kMaxCount) throw_invalid("num_segments exceeds 2^31");

  std::vector<SegmentRange> segments;
  segments.reserve(static_cast<std::size_t>(num_segments));
  for (std::int64_t i = 0; i < num_segments; ++i) {
    segments.push_back({mul_div_floor(i, frame_count, num_segments),
                        mul_div_floor(i + 1, frame_count, num_segments)});
  }
  return segments;
}

std::vector<std::int64_t> sample_frames(const SegmentRange& segment,
                                        std::int64_t frames_per_segment) {
  if (frames_per_segment < 1) {
    throw_invalid("frames_per_segment must be >= 1, got " + std::to_string(frames_per_segment));
  }
  if (frames_per_segment > kMaxCount) throw_invalid("frames_per_segment exceeds 2^31");
  if (segment.start < 0 || segment.end < segment.start) {
    throw_invalid("malformed segment range [" + std::to_string(segment.start) + ", " +
                  std::to_string(segment.end) + ")");
  }

  const auto count = static_cast<std::size_t>(frames_per_segment);
  const std::int64_t length = segment.length();
  if (length == 0) {
    const std::int64_t frame = segment.start > 0 ? segment.start - 1 : 0;
    return std::vector<std::int64_t>(count, frame);
  }

  std::vector<std::int64_t> indices;
  indices.reserve(count);
  if (length >= frames_per_segment) {
    for (std::int64_t j = 0; j < frames_per_segment; ++j) {
      indices.push_back(segment.start + mul_div_floor(j, length, frames_per_segment));
    }
  } else {
    for (std::int64_t f = segment.start; f < segment.end; ++f) indices.push_back(f);
    indices.resize(count, segment.end - 1);
  }
  return indices;
}

void validate_manifest(const VideoManifest& manifest) {
  if (manifest.frame_count < 1) {
    throw_invalid("video '" + manifest.video_id + "': frame_count must be >= 1");
  }
  if (manifest.label != 0 && manifest.label != 1) {
    throw_invalid("video '" + manifest.video_id + "': label must be 0 or 1");
  }
}

SamplingPlan build_plan(const VideoManifest& manifest, std::int64_t num_segments,
                        std::int64_t frames_per_segment) {
  validate_manifest(manifest);
  if (frames_per_segment < 1) {
    throw_invalid("frames_per_segment must be >= 1, got " + std::to_string(frames_per_segment));
  }

  SamplingPlan plan;
  plan.frame_count = manifest.frame_count;
  plan.num_segments = num_segments;
  plan.frames_per_segment = frames_per_segment;
  plan.segments = plan_segments(manifest.frame_count, num_segments);
  plan.sampled_indices.reserve(plan.segments.size());
  for (const auto& segment : plan.segments) {
    plan.sampled_indices.push_back(sample_frames(segment, frames_per_segment));
  }
  return plan;
}

}  // namespace milvad

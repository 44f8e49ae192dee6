// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "milvad/error.hpp"
#include "milvad/temporal_plan.hpp"

using namespace milvad;

namespace {

// Frame f lies in segment i iff i*T < N*(f+1) <= (i+1)*T, so its owner is
// ceil(N*(f+1)/T) - 1. Derived independently of the boundary formula.
std::int64_t owning_segment(std::int64_t frame, std::int64_t frames, std::int64_t segments) {
  const std::int64_t num = segments * (frame + 1);
  return (num + frames - 1) / frames - 1;
}

// Largest q with q*F <= j*L, found by scanning.
std::int64_t scan_floor(std::int64_t j, std::int64_t length, std::int64_t per_segment) {
  std::int64_t q = 0;
  while ((q + 1) * per_segment <= j * length) ++q;
  return q;
}

}  // namespace

TEST_CASE("exact division gives equal 16-frame segments") {
  const auto segments = plan_segments(512, 32);
  REQUIRE(segments.size() == 32);
  for (std::int64_t i = 0; i < 32; ++i) {
    CHECK(segments[static_cast<std::size_t>(i)] == SegmentRange{16 * i, 16 * i + 16});
  }
}

TEST_CASE("one frame per segment") {
  const auto segments = plan_segments(32, 32);
  for (std::int64_t i = 0; i < 32; ++i) CHECK(segments[static_cast<std::size_t>(i)] == SegmentRange{i, i + 1});
}

TEST_CASE("33 frames over 32 segments puts the extra frame in the last segment") {
  const auto segments = plan_segments(33, 32);
  for (std::int64_t f = 0; f < 33; ++f) {
    const auto& seg = segments[static_cast<std::size_t>(owning_segment(f, 33, 32))];
    CHECK(seg.start <= f);
    CHECK(f < seg.end);
  }
  CHECK(segments[31] == SegmentRange{31, 33});
  for (std::int64_t i = 0; i < 31; ++i) CHECK(segments[static_cast<std::size_t>(i)].length() == 1);
}

TEST_CASE("invalid plan arguments") {
  CHECK_THROWS_AS(plan_segments(0, 32), Error);
  CHECK_THROWS_AS(plan_segments(10, 0), Error);
  CHECK_THROWS_AS(plan_segments(-5, 3), Error);
  try {
    plan_segments(0, 32);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
  CHECK_THROWS_AS(sample_frames({0, 4}, 0), Error);
  CHECK_THROWS_AS(build_plan({"v", 100, 2}, 32, 16), Error);
}

TEST_CASE("sample_frames") {
  SUBCASE("identity when length equals the clip size") {
    const auto idx = sample_frames({0, 16}, 16);
    for (std::int64_t j = 0; j < 16; ++j) CHECK(idx[static_cast<std::size_t>(j)] == j);
  }
  SUBCASE("short segment pads with its last frame") {
    const std::vector<std::int64_t> expected = {100, 101, 102, 103, 104, 105, 106, 107,
                                                108, 109, 109, 109, 109, 109, 109, 109};
    CHECK(sample_frames({100, 110}, 16) == expected);
  }
  SUBCASE("stride-two sampling of a 32-frame segment") {
    const auto idx = sample_frames({0, 32}, 16);
    for (std::int64_t j = 0; j < 16; ++j) CHECK(idx[static_cast<std::size_t>(j)] == 2 * j);
  }
  SUBCASE("empty segment repeats the preceding frame") {
    CHECK(sample_frames({7, 7}, 4) == std::vector<std::int64_t>{6, 6, 6, 6});
    CHECK(sample_frames({0, 0}, 3) == std::vector<std::int64_t>{0, 0, 0});
  }
}

TEST_CASE("build_plan edge cases") {
  SUBCASE("512 frames covers every frame") {
    const auto plan = build_plan({"v", 512, 0}, 32, 16);
    REQUIRE(plan.sampled_indices.size() == 32);
    std::vector<int> seen(512, 0);
    for (const auto& indices : plan.sampled_indices) {
      REQUIRE(indices.size() == 16);
      for (auto f : indices) seen[static_cast<std::size_t>(f)]++;
    }
    for (int count : seen) CHECK(count == 1);
  }
  SUBCASE("single-frame video samples frame 0 everywhere") {
    const auto plan = build_plan({"v", 1, 1}, 32, 16);
    for (const auto& indices : plan.sampled_indices) {
      CHECK(indices == std::vector<std::int64_t>(16, 0));
    }
  }
  SUBCASE("1000 frames matches the scanning oracle") {
    const auto plan = build_plan({"v", 1000, 0}, 32, 16);
    for (std::int64_t i = 0; i < 32; ++i) {
      const auto& seg = plan.segments[static_cast<std::size_t>(i)];
      // Boundaries: seg.start is the first frame owned by segment i.
      CHECK(owning_segment(seg.start, 1000, 32) == i);
      CHECK(owning_segment(seg.end - 1, 1000, 32) == i);
      if (seg.start > 0) CHECK(owning_segment(seg.start - 1, 1000, 32) == i - 1);
      for (std::int64_t j = 0; j < 16; ++j) {
        CHECK(plan.sampled_indices[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
              seg.start + scan_floor(j, seg.length(), 16));
      }
    }
  }
}

TEST_CASE("property: partition, bounds, ordering and determinism over random tuples") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> dist(1, 1000);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::int64_t frames = dist(rng);
    const std::int64_t segments = dist(rng);
    const std::int64_t per_segment = dist(rng);
    const auto plan = build_plan({"v", frames, 0}, segments, per_segment);
    REQUIRE(plan.segments.size() == static_cast<std::size_t>(segments));

    // First violated invariant, if any; one assertion per tuple.
    std::string violation;
    std::int64_t cursor = 0;
    for (std::size_t i = 0; i < plan.segments.size() && violation.empty(); ++i) {
      const auto& seg = plan.segments[i];
      if (seg.start != cursor || seg.end < seg.start) violation = "partition at segment " + std::to_string(i);
      cursor = seg.end;
      const auto& indices = plan.sampled_indices[i];
      if (indices.size() != static_cast<std::size_t>(per_segment)) violation = "count at segment " + std::to_string(i);
      for (std::size_t j = 0; j < indices.size() && violation.empty(); ++j) {
        const bool in_video = indices[j] >= 0 && indices[j] < frames;
        const bool in_segment = seg.length() == 0 || (indices[j] >= seg.start && indices[j] < seg.end);
        const bool ordered = j == 0 || indices[j - 1] <= indices[j];
        if (!in_video || !in_segment || !ordered) {
          violation = "index " + std::to_string(j) + " of segment " + std::to_string(i);
        }
      }
    }
    if (violation.empty() && cursor != frames) violation = "cover ends at " + std::to_string(cursor);
    INFO("T=" << frames << " N=" << segments << " F=" << per_segment);
    CHECK(violation == "");
    if (trial % 100 == 0) CHECK(build_plan({"v", frames, 0}, segments, per_segment) == plan);
  }
}

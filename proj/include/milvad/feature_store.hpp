// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

// Binary container for per-video segment features ("bag files").
//
// Layout, all integers and floats little-endian:
//
//   header (32 bytes)
//     [0]  8 bytes  magic "MILBAGS1"
//     [8]  u32      format version (1)
//     [12] u32      video count
//     [16] u32      segments per video
//     [20] u32      i3d feature width
//     [24] u32      tsf feature width
//     [28] u32      CRC-32 (zlib polynomial) of bytes [0, 28)
//   records, one per video
//     u32           video id length in bytes
//     bytes         video id (UTF-8, not terminated)
//     u8            label (0 normal, 1 anomalous)
//     f32[N*I]      i3d matrix, row-major (segment-major)
//     f32[N*T]      tsf matrix, row-major
//   footer
//     u64[count]    absolute byte offset of each record
//     8 bytes       end tag "MILBEND1"

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "milvad/error.hpp"

namespace milvad {

inline constexpr std::array<char, 8> kBagMagic = {'M', 'I', 'L', 'B', 'A', 'G', 'S', '1'};
inline constexpr std::array<char, 8> kBagEndTag = {'M', 'I', 'L', 'B', 'E', 'N', 'D', '1'};
inline constexpr std::uint32_t kBagFormatVersion = 1;
inline constexpr std::size_t kBagHeaderSize = 32;

struct SegmentFeatureBag {
  std::string video_id;
  int label = 0;
  std::size_t num_segments = 0;
  std::size_t i3d_dim = 0;
  std::size_t tsf_dim = 0;
  std::vector<float> i3d_features;  // num_segments x i3d_dim, row-major
  std::vector<float> tsf_features;  // num_segments x tsf_dim, row-major

  std::span<const float> i3d_row(std::size_t segment) const {
    return std::span<const float>(i3d_features).subspan(segment * i3d_dim, i3d_dim);
  }
  std::span<const float> tsf_row(std::size_t segment) const {
    return std::span<const float>(tsf_features).subspan(segment * tsf_dim, tsf_dim);
  }

  bool operator==(const SegmentFeatureBag&) const = default;
};

struct BagFileHeader {
  std::array<char, 8> magic = kBagMagic;
  std::uint32_t format_version = kBagFormatVersion;
  std::uint32_t video_count = 0;
  std::uint32_t num_segments = 0;
  std::uint32_t i3d_dim = 0;
  std::uint32_t tsf_dim = 0;
};

/// Throws Error(kDimensionMismatch / kNonFinite / kInvalidArgument) when a
/// bag violates its own shape, finiteness or label invariants.
void check_bag(const SegmentFeatureBag& bag);

std::vector<std::uint8_t> encode_bags(std::span<const SegmentFeatureBag> bags);
std::vector<SegmentFeatureBag> decode_bags(std::span<const std::uint8_t> bytes);

/// All bags are validated before any byte is written. Output is
/// byte-deterministic for identical input.
void write_bags(const std::filesystem::path& path, std::span<const SegmentFeatureBag> bags);
std::vector<SegmentFeatureBag> read_bags(const std::filesystem::path& path);

struct ValidationReport {
  bool ok = false;
  ErrorCode error = ErrorCode::kOk;
  std::string message;  // error description when !ok
  std::size_t video_count = 0;
  std::size_t num_segments = 0;
  std::size_t i3d_dim = 0;
  std::size_t tsf_dim = 0;
  std::size_t normal_count = 0;
  std::size_t anomalous_count = 0;

  /// "10 videos, labels: 6/4" followed by a dimensions line, or the error.
  std::string to_text() const;
};

/// Never throws for format problems; they are captured in the report.
ValidationReport validate_bags(const std::filesystem::path& path);
ValidationReport validate_bag_bytes(std::span<const std::uint8_t> bytes);

}  // namespace milvad

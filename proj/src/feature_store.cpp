// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/feature_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binary_io.hpp"

namespace milvad {
namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr std::uint64_t kMaxU32 = std::numeric_limits<std::uint32_t>::max();

std::string describe(const std::string& video_id, std::size_t record) {
  return "video '" + video_id + "' (record " + std::to_string(record) + ")";
}

void check_finite(std::span<const float> values, std::size_t dim, const char* backbone,
                  const std::string& where) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kNonFinite,
                  where + ": non-finite " + backbone + " value at segment " +
                      std::to_string(i / dim) + ", dim " + std::to_string(i % dim));
    }
  }
}

void check_bag_at(const SegmentFeatureBag& bag, const std::string& where) {
  if (bag.label != 0 && bag.label != 1) {
    throw_invalid(where + ": label must be 0 or 1, got " + std::to_string(bag.label));
  }
  if (bag.num_segments == 0 || bag.i3d_dim == 0 || bag.tsf_dim == 0) {
    throw Error(ErrorCode::kDimensionMismatch, where + ": dimensions must be positive");
  }
  if (bag.i3d_features.size() != bag.num_segments * bag.i3d_dim ||
      bag.tsf_features.size() != bag.num_segments * bag.tsf_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                where + ": feature matrix sizes do not match the declared dimensions");
  }
  check_finite(bag.i3d_features, bag.i3d_dim, "i3d", where);
  check_finite(bag.tsf_features, bag.tsf_dim, "tsf", where);
}

void encode_header(ByteWriter& w, std::vector<std::uint8_t>& out, const BagFileHeader& h) {
  w.put_bytes(std::string_view(h.magic.data(), h.magic.size()));
  w.put_u32(h.format_version);
  w.put_u32(h.video_count);
  w.put_u32(h.num_segments);
  w.put_u32(h.i3d_dim);
  w.put_u32(h.tsf_dim);
  w.put_u32(detail::crc32_of(std::span<const std::uint8_t>(out.data(), out.size())));
}

BagFileHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorCode::kTruncated, "file is empty");
  const std::size_t magic_len = std::min(bytes.size(), kBagMagic.size());
  if (!std::equal(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(magic_len),
                  kBagMagic.begin())) {
    throw Error(ErrorCode::kBadMagic, "bad magic: not a MILBAGS1 feature file");
  }
  if (bytes.size() < kBagHeaderSize) {
    throw Error(ErrorCode::kTruncated, "truncated header (" + std::to_string(bytes.size()) +
                                           " of " + std::to_string(kBagHeaderSize) + " bytes)");
  }

  ByteReader r(bytes);
  BagFileHeader h;
  r.get_bytes(kBagMagic.size());
  h.format_version = r.get_u32();
  h.video_count = r.get_u32();
  h.num_segments = r.get_u32();
  h.i3d_dim = r.get_u32();
  h.tsf_dim = r.get_u32();
  const std::uint32_t stored_crc = r.get_u32();

  if (h.format_version != kBagFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported format version " + std::to_string(h.format_version));
  }
  if (stored_crc != detail::crc32_of(bytes.first(kBagHeaderSize - 4))) {
    throw Error(ErrorCode::kHeaderChecksum, "header checksum mismatch");
  }
  if (h.num_segments == 0 || h.i3d_dim == 0 || h.tsf_dim == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "header declares a zero dimension");
  }
  return h;
}

}  // namespace

void check_bag(const SegmentFeatureBag& bag) { check_bag_at(bag, "video '" + bag.video_id + "'"); }

std::vector<std::uint8_t> encode_bags(std::span<const SegmentFeatureBag> bags) {
  BagFileHeader header;
  if (bags.size() > kMaxU32) throw_invalid("too many videos for one bag file");
  header.video_count = static_cast<std::uint32_t>(bags.size());
  if (!bags.empty()) {
    const auto& first = bags.front();
    if (first.num_segments > kMaxU32 || first.i3d_dim > kMaxU32 || first.tsf_dim > kMaxU32) {
      throw Error(ErrorCode::kDimensionMismatch, "dimensions exceed the 32-bit header fields");
    }
    header.num_segments = static_cast<std::uint32_t>(first.num_segments);
    header.i3d_dim = static_cast<std::uint32_t>(first.i3d_dim);
    header.tsf_dim = static_cast<std::uint32_t>(first.tsf_dim);
  } else {
    header.num_segments = 1;
    header.i3d_dim = 1;
    header.tsf_dim = 1;
  }

  for (std::size_t i = 0; i < bags.size(); ++i) {
    const auto& bag = bags[i];
    const std::string where = describe(bag.video_id, i);
    if (bag.num_segments != header.num_segments || bag.i3d_dim != header.i3d_dim ||
        bag.tsf_dim != header.tsf_dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  where + ": dimensions differ from the first bag");
    }
    check_bag_at(bag, where);
    if (bag.video_id.size() > kMaxU32) throw_invalid(where + ": video id too long");
  }

  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  encode_header(w, out, header);

  std::vector<std::uint64_t> offsets;
  offsets.reserve(bags.size());
  for (const auto& bag : bags) {
    offsets.push_back(w.size());
    w.put_u32(static_cast<std::uint32_t>(bag.video_id.size()));
    w.put_bytes(bag.video_id);
    w.put_u8(static_cast<std::uint8_t>(bag.label));
    for (float v : bag.i3d_features) w.put_f32(v);
    for (float v : bag.tsf_features) w.put_f32(v);
  }
  for (std::uint64_t offset : offsets) w.put_u64(offset);
  w.put_bytes(std::string_view(kBagEndTag.data(), kBagEndTag.size()));
  return out;
}

std::vector<SegmentFeatureBag> decode_bags(std::span<const std::uint8_t> bytes) {
  const BagFileHeader header = decode_header(bytes);
  const std::size_t i3d_count = std::size_t{header.num_segments} * header.i3d_dim;
  const std::size_t tsf_count = std::size_t{header.num_segments} * header.tsf_dim;

  ByteReader r(bytes);
  r.get_bytes(kBagHeaderSize);

  std::vector<SegmentFeatureBag> bags;
  std::vector<std::uint64_t> offsets;
  for (std::size_t i = 0; i < header.video_count; ++i) {
    const std::string truncated = "truncated payload in record " + std::to_string(i);
    offsets.push_back(r.position());
    if (r.remaining() < 4) throw Error(ErrorCode::kTruncated, truncated);
    const std::uint32_t id_len = r.get_u32();
    if (r.remaining() < id_len) throw Error(ErrorCode::kTruncated, truncated);

    SegmentFeatureBag bag;
    bag.video_id = std::string(r.get_bytes(id_len));
    const std::string where = describe(bag.video_id, i);
    if (r.remaining() < 1 + 4 * (i3d_count + tsf_count)) {
      throw Error(ErrorCode::kTruncated, truncated + ", " + where);
    }
    const std::uint8_t label = r.get_u8();
    if (label > 1) {
      throw Error(ErrorCode::kCorruptRecord, where + ": invalid label byte " + std::to_string(label));
    }
    bag.label = label;
    bag.num_segments = header.num_segments;
    bag.i3d_dim = header.i3d_dim;
    bag.tsf_dim = header.tsf_dim;
    bag.i3d_features.resize(i3d_count);
    bag.tsf_features.resize(tsf_count);
    for (float& v : bag.i3d_features) v = r.get_f32();
    for (float& v : bag.tsf_features) v = r.get_f32();
    check_finite(bag.i3d_features, bag.i3d_dim, "i3d", where);
    check_finite(bag.tsf_features, bag.tsf_dim, "tsf", where);
    bags.push_back(std::move(bag));
  }

  const std::size_t footer_size = 8 * std::size_t{header.video_count} + kBagEndTag.size();
  if (r.remaining() < footer_size) throw Error(ErrorCode::kTruncated, "truncated index footer");
  for (std::size_t i = 0; i < header.video_count; ++i) {
    if (r.get_u64() != offsets[i]) {
      throw Error(ErrorCode::kCorruptRecord,
                  "index footer offset for record " + std::to_string(i) + " does not match");
    }
  }
  const std::string_view end_tag = r.get_bytes(kBagEndTag.size());
  if (!std::equal(end_tag.begin(), end_tag.end(), kBagEndTag.begin())) {
    throw Error(ErrorCode::kCorruptRecord, "missing end tag after index footer");
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kCorruptRecord,
                std::to_string(r.remaining()) + " trailing bytes after end tag");
  }
  return bags;
}

void write_bags(const std::filesystem::path& path, std::span<const SegmentFeatureBag> bags) {
  const auto bytes = encode_bags(bags);
  detail::write_file(path, bytes);
}

std::vector<SegmentFeatureBag> read_bags(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return decode_bags(bytes);
}

ValidationReport validate_bag_bytes(std::span<const std::uint8_t> bytes) {
  ValidationReport report;
  try {
    const auto bags = decode_bags(bytes);
    const BagFileHeader header = decode_header(bytes);
    report.ok = true;
    report.video_count = bags.size();
    report.num_segments = header.num_segments;
    report.i3d_dim = header.i3d_dim;
    report.tsf_dim = header.tsf_dim;
    for (const auto& bag : bags) (bag.label == 0 ? report.normal_count : report.anomalous_count)++;
  } catch (const Error& e) {
    report.ok = false;
    report.error = e.code();
    report.message = e.what();
  }
  return report;
}

ValidationReport validate_bags(const std::filesystem::path& path) {
  try {
    return validate_bag_bytes(detail::read_file(path));
  } catch (const Error& e) {
    ValidationReport report;
    report.error = e.code();
    report.message = e.what();
    return report;
  }
}

std::string ValidationReport::to_text() const {
  if (!ok) return std::string("invalid: [") + error_code_name(error) + "] " + message + "\n";
  std::string text = std::to_string(video_count) + " videos, labels: " +
                     std::to_string(normal_count) + "/" + std::to_string(anomalous_count) + "\n";
  text += "segments: " + std::to_string(num_segments) + ", i3d_dim: " + std::to_string(i3d_dim) +
          ", tsf_dim: " + std::to_string(tsf_dim) + ", fused_dim: " +
          std::to_string(i3d_dim + tsf_dim) + "\n";
  return text;
}

}  // namespace milvad

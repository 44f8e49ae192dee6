// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "binary_io.hpp"
#include "milvad/error.hpp"

namespace milvad {

std::vector<std::uint8_t> encode_checkpoint(const HeadParameters& params) {
  params.validate();
  const auto hidden = params.hidden_sizes();
  const std::size_t max_u32 = std::numeric_limits<std::uint32_t>::max();
  if (params.input_dim() > max_u32 || *std::max_element(hidden.begin(), hidden.end()) > max_u32) {
    throw_invalid("head dimensions exceed the 32-bit header fields");
  }

  std::vector<std::uint8_t> out;
  detail::ByteWriter w(out);
  w.put_bytes(std::string_view(kCheckpointMagic.data(), kCheckpointMagic.size()));
  w.put_u32(kCheckpointVersion);
  w.put_u32(static_cast<std::uint32_t>(params.input_dim()));
  for (std::size_t h : hidden) w.put_u32(static_cast<std::uint32_t>(h));
  w.put_f32(static_cast<float>(params.leaky_slope));
  w.put_u32(detail::crc32_of(out));

  for (const auto& layer : params.layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        w.put_f32(static_cast<float>(layer.weight(r, c)));
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) w.put_f32(static_cast<float>(layer.bias(r)));
  }
  return out;
}

HeadParameters decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorCode::kTruncated, "checkpoint file is empty");
  const std::size_t magic_len = std::min(bytes.size(), kCheckpointMagic.size());
  if (!std::equal(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(magic_len),
                  kCheckpointMagic.begin())) {
    throw Error(ErrorCode::kBadMagic, "bad magic: not a MILHEAD1 checkpoint");
  }
  if (bytes.size() < kCheckpointHeaderSize) throw Error(ErrorCode::kTruncated, "truncated checkpoint header");

  detail::ByteReader r(bytes);
  r.get_bytes(kCheckpointMagic.size());
  const std::uint32_t version = r.get_u32();
  const std::uint32_t input_dim = r.get_u32();
  std::array<std::size_t, 3> hidden{};
  for (auto& h : hidden) h = r.get_u32();
  const float slope = r.get_f32();
  const std::uint32_t stored_crc = r.get_u32();

  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "unsupported checkpoint version " + std::to_string(version));
  }
  if (stored_crc != detail::crc32_of(bytes.first(kCheckpointHeaderSize - 4))) {
    throw Error(ErrorCode::kHeaderChecksum, "checkpoint header checksum mismatch");
  }
  if (input_dim == 0 || hidden[0] == 0 || hidden[1] == 0 || hidden[2] == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "checkpoint declares a zero dimension");
  }
  if (!std::isfinite(slope)) throw Error(ErrorCode::kNonFinite, "checkpoint slope is non-finite");

  HeadParameters params = HeadParameters::zeros(input_dim, hidden, static_cast<double>(slope));
  const std::size_t payload = 4 * params.num_parameters();
  if (r.remaining() < payload) throw Error(ErrorCode::kTruncated, "truncated checkpoint payload");
  if (r.remaining() > payload) {
    throw Error(ErrorCode::kCorruptRecord,
                std::to_string(r.remaining() - payload) + " trailing bytes after checkpoint payload");
  }

  auto read_value = [&r](std::size_t layer) {
    const float v = r.get_f32();
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "non-finite parameter in layer " + std::to_string(layer + 1));
    }
    return static_cast<double>(v);
  };
  for (std::size_t l = 0; l < kNumHeadLayers; ++l) {
    auto& layer = params.layers[l];
    for (Eigen::Index row = 0; row < layer.weight.rows(); ++row) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(row, c) = read_value(l);
    }
    for (Eigen::Index row = 0; row < layer.bias.size(); ++row) layer.bias(row) = read_value(l);
  }
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const HeadParameters& params) {
  detail::write_file(path, encode_checkpoint(params));
}

HeadParameters load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_file(path));
}

}  // namespace milvad

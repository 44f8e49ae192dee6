// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

// Head checkpoint file. Little-endian, same scalar convention as bag files:
//
//   [0]  8 bytes  magic "MILHEAD1"
//   [8]  u32      format version (1)
//   [12] u32      input width D
//   [16] u32      h1
//   [20] u32      h2
//   [24] u32      h3
//   [28] f32      LeakyReLU slope
//   [32] u32      CRC-32 of bytes [0, 32)
//   [36] f32 data W1 (h1 x D, row-major), b1, W2, b2, W3, b3, W4 (1 x h3), b4

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "milvad/mil_head.hpp"

namespace milvad {

inline constexpr std::array<char, 8> kCheckpointMagic = {'M', 'I', 'L', 'H', 'E', 'A', 'D', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderSize = 36;

std::vector<std::uint8_t> encode_checkpoint(const HeadParameters& params);
HeadParameters decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const HeadParameters& params);
HeadParameters load_checkpoint(const std::filesystem::path& path);

}  // namespace milvad

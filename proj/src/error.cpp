// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#include "milvad/error.hpp"

namespace milvad {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kHeaderChecksum: return "header-checksum";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kCorruptRecord: return "corrupt-record";
    case ErrorCode::kNumeric: return "numeric-failure";
    case ErrorCode::kInternal: return "internal-error";
  }
  return "unknown";
}

}  // namespace milvad

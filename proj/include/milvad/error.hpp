// SPDX-FileCopyrightText: Copyright (c) 2026 The milvad Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace milvad {

// Numeric values are part of the C ABI (see milvad.h) and must not change.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kIo = 2,
  kBadMagic = 3,
  kUnsupportedVersion = 4,
  kHeaderChecksum = 5,
  kTruncated = 6,
  kNonFinite = 7,
  kDimensionMismatch = 8,
  kCorruptRecord = 9,
  kNumeric = 10,
  kInternal = 11,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for the feature-store / checkpoint format taxonomy.
  bool is_format_error() const noexcept {
    return code_ >= ErrorCode::kBadMagic && code_ <= ErrorCode::kCorruptRecord;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace milvad

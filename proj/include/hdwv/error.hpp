// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdwv {

enum class ErrorCode {
  NonPowerOfTwo,
  OrderOutOfRange,
  DimensionMismatch,
  InvalidTernaryEntry,
  SingularMatrix,
  InvalidDimensions,
  CoarseResetForbidden,
  IndexOutOfRange,
  LevelOutOfRange,
  TargetOutOfRange,
  TargetNotRepresentable,
  UnknownEventKind,
  AllZeroTensor,
  CodeOutOfRange,
  ConfigInconsistent,
  InvalidSpec,
  OutputUnwritable,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hdwv

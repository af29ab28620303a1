// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/error.hpp"

namespace hdwv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPowerOfTwo: return "NonPowerOfTwo";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidTernaryEntry: return "InvalidTernaryEntry";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::CoarseResetForbidden: return "CoarseResetForbidden";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::TargetNotRepresentable: return "TargetNotRepresentable";
    case ErrorCode::UnknownEventKind: return "UnknownEventKind";
    case ErrorCode::AllZeroTensor: return "AllZeroTensor";
    case ErrorCode::CodeOutOfRange: return "CodeOutOfRange";
    case ErrorCode::ConfigInconsistent: return "ConfigInconsistent";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::OutputUnwritable: return "OutputUnwritable";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace hdwv

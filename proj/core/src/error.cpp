/*
   Copyright 2026 The segloss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "segloss/error.hpp"

namespace segloss {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::NonPositiveSpacing: return "NonPositiveSpacing";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::ThresholdOutOfRange: return "ThresholdOutOfRange";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptySurface: return "EmptySurface";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::LesionPlacementFailure: return "LesionPlacementFailure";
    case ErrorCode::PatchTooLarge: return "PatchTooLarge";
    case ErrorCode::FeatureMismatch: return "FeatureMismatch";
    case ErrorCode::ZeroMean: return "ZeroMean";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

bool Error::is_io() const noexcept {
  switch (code_) {
    case ErrorCode::BadMagic:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::UnsupportedDtype:
    case ErrorCode::TruncatedPayload:
    case ErrorCode::TrailingData:
    case ErrorCode::IoFailure:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

}  // namespace segloss

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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segloss {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteData,
  NonPositiveSpacing,
  ValueOutOfRange,
  ThresholdOutOfRange,
  BadMagic,
  UnsupportedVersion,
  UnsupportedDtype,
  TruncatedPayload,
  TrailingData,
  IoFailure,
  ShapeMismatch,
  UnknownKind,
  InvalidArgument,
  ParseError,
  EmptySurface,
  StepTooLarge,
  LesionPlacementFailure,
  PatchTooLarge,
  FeatureMismatch,
  ZeroMean,
  TooFewValues,
  EmptyInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every segloss module. The code lets callers
/// (notably the CLI) map failures onto exit statuses without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix carried by what().
  const std::string& detail() const noexcept { return detail_; }

  /// True for failures caused by the filesystem or a malformed file.
  bool is_io() const noexcept;

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace segloss

// Copyright 2026 The nlatten Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nlatten/error.h"

namespace nlatten {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kCutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kStepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::kTraceDriftExceeded: return "TraceDriftExceeded";
    case ErrorKind::kPositivityViolated: return "PositivityViolated";
    case ErrorKind::kUnsupportedChannels: return "UnsupportedChannels";
    case ErrorKind::kNoClosedForm: return "NoClosedForm";
    case ErrorKind::kNonpositiveGammaB: return "NonpositiveGammaB";
    case ErrorKind::kNoInteriorMinimum: return "NoInteriorMinimum";
    case ErrorKind::kSeedStreamExhausted: return "SeedStreamExhausted";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kValidationError: return "ValidationError";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
      kind_(kind) {}

bool Error::is_numerical() const noexcept {
  return kind_ == ErrorKind::kStepSizeUnderflow ||
         kind_ == ErrorKind::kTraceDriftExceeded ||
         kind_ == ErrorKind::kPositivityViolated;
}

}  // namespace nlatten

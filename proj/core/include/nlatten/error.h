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

#ifndef NLATTEN_ERROR_H_
#define NLATTEN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlatten {

enum class ErrorKind {
  kInvalidArgument,
  kCutoffTooSmall,
  kDimensionMismatch,
  kStepSizeUnderflow,
  kTraceDriftExceeded,
  kPositivityViolated,
  kUnsupportedChannels,
  kNoClosedForm,
  kNonpositiveGammaB,
  kNoInteriorMinimum,
  kSeedStreamExhausted,
  kParseError,
  kValidationError,
  kIoError,
};

std::string_view ErrorKindName(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

  // True for failures of the numerical engines (as opposed to bad input).
  bool is_numerical() const noexcept;

 private:
  ErrorKind kind_;
};

}  // namespace nlatten

#endif  // NLATTEN_ERROR_H_
